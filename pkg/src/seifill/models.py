"""Data models for seifill.

Holes serialize as their canonical names (``in``, ``out``, ``L<leg>.<level>.<index>``,
``R<leg>.<level>.<index>``) and rationals as ``"p/q"`` strings, so every model
dumps to stable JSON.
"""

from __future__ import annotations

import re
from enum import StrEnum
from fractions import Fraction
from typing import Annotated, Any, Literal

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_serializer,
    field_validator,
    model_serializer,
    model_validator,
)

from .core.cf import as_chain, cf_eval, format_rational, parse_rational
from .errors import PresentationError

Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]

_HOLE_NAME = re.compile(r"^(?P<kind>[LR])(?P<leg>\d+)\.(?P<level>\d+)\.(?P<index>\d+)$")


class HoleKind(StrEnum):
    INNER = "in"
    OUTER = "out"
    LAMBDA = "lambda"
    RHO = "rho"


_KIND_ORDER = {HoleKind.INNER: 0, HoleKind.OUTER: 1, HoleKind.LAMBDA: 2, HoleKind.RHO: 3}


class Hole(BaseModel):
    """A boundary component of the planar page."""

    model_config = ConfigDict(frozen=True)

    kind: HoleKind
    leg: int = Field(default=0, ge=0)
    level: int = Field(default=0, ge=0)
    index: int = Field(default=0, ge=0)

    @model_validator(mode="before")
    @classmethod
    def _from_name(cls, data: Any) -> Any:
        if isinstance(data, str):
            return cls.fields_from_name(data)
        return data

    @model_validator(mode="after")
    def _check_indices(self) -> Hole:
        stabilization = self.kind in (HoleKind.LAMBDA, HoleKind.RHO)
        if stabilization and min(self.leg, self.level, self.index) < 1:
            raise ValueError("stabilization holes need leg, level and index >= 1")
        if not stabilization and (self.leg, self.level, self.index) != (0, 0, 0):
            raise ValueError("boundary holes carry no leg/level/index")
        return self

    @model_serializer
    def _to_name(self) -> str:
        return self.name

    @staticmethod
    def fields_from_name(name: str) -> dict[str, Any]:
        name = name.strip()
        if name in ("in", "out"):
            return {"kind": HoleKind(name)}
        match = _HOLE_NAME.match(name)
        if not match:
            raise ValueError(f"unknown hole name {name!r}")
        return {
            "kind": HoleKind.LAMBDA if match["kind"] == "L" else HoleKind.RHO,
            "leg": int(match["leg"]),
            "level": int(match["level"]),
            "index": int(match["index"]),
        }

    @classmethod
    def parse(cls, name: str) -> Hole:
        return cls(**cls.fields_from_name(name))

    @property
    def name(self) -> str:
        if self.kind is HoleKind.INNER:
            return "in"
        if self.kind is HoleKind.OUTER:
            return "out"
        prefix = "L" if self.kind is HoleKind.LAMBDA else "R"
        return f"{prefix}{self.leg}.{self.level}.{self.index}"

    def sort_key(self) -> tuple[int, int, int, int]:
        return (_KIND_ORDER[self.kind], self.leg, self.level, self.index)

    def __str__(self) -> str:
        return self.name


INNER = Hole(kind=HoleKind.INNER)
OUTER_TOKEN = Hole(kind=HoleKind.OUTER)


def sort_holes(holes: Any) -> tuple[Hole, ...]:
    return tuple(sorted(holes, key=Hole.sort_key))


def pair_key(a: Hole, b: Hole) -> str:
    """Canonical ``"a|b"`` key of an unordered hole pair."""
    first, second = sorted((a, b), key=Hole.sort_key)
    return f"{first.name}|{second.name}"


class SignedTwist(BaseModel):
    """A Dehn twist, up to conjugation, given by the holes it encircles."""

    model_config = ConfigDict(frozen=True)

    sign: Literal[1, -1]
    holes: frozenset[Hole]
    label: str = ""

    @field_validator("holes", mode="before")
    @classmethod
    def _coerce_holes(cls, value: Any) -> Any:
        if isinstance(value, str):
            raise ValueError("holes must be a list of hole names")
        return frozenset(Hole.parse(h) if isinstance(h, str) else h for h in value)

    @field_validator("holes")
    @classmethod
    def _nonempty(cls, value: frozenset[Hole]) -> frozenset[Hole]:
        if not value:
            raise ValueError("a twist must encircle at least one hole")
        return value

    @field_serializer("holes")
    def _dump_holes(self, holes: frozenset[Hole]) -> list[str]:
        return [h.name for h in sort_holes(holes)]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(h.name for h in sort_holes(self.holes))

    def sort_key(self) -> tuple[Any, ...]:
        return (-self.sign, len(self.holes), [h.sort_key() for h in sort_holes(self.holes)])


class Leg(BaseModel):
    """One chain of Legendrian unknots with its rotation numbers."""

    model_config = ConfigDict(frozen=True)

    coefficients: tuple[int, ...]
    rotations: tuple[int, ...]

    @model_validator(mode="after")
    def _check_invariants(self) -> Leg:
        try:
            as_chain(self.coefficients)
        except ValueError as exc:
            raise PresentationError(f"coefficient invariant: {exc}") from exc
        if len(self.rotations) != len(self.coefficients):
            raise PresentationError(
                "rotation count invariant: one rotation number per unknot "
                f"({len(self.coefficients)} unknots, {len(self.rotations)} rotations)"
            )
        for j, rot in enumerate(self.rotations, start=1):
            stabs = self.stab_count(j)
            if abs(rot) > stabs:
                raise PresentationError(
                    f"rotation range invariant: unknot {j} has |rot|={abs(rot)} "
                    f"but only {stabs} stabilizations"
                )
            if (stabs - rot) % 2:
                raise PresentationError(
                    f"rotation parity invariant: unknot {j} has rot={rot} "
                    f"with {stabs} stabilizations"
                )
        return self

    @property
    def n(self) -> int:
        return len(self.coefficients)

    @property
    def r(self) -> Fraction:
        return -1 / cf_eval(self.coefficients)

    def stab_count(self, j: int) -> int:
        """Stabilizations of unknot ``j`` (1-indexed)."""
        a = self.coefficients[j - 1]
        return -a - 1 if j == 1 else -a - 2

    def lambda_count(self, j: int) -> int:
        return (self.stab_count(j) + self.rotations[j - 1]) // 2

    def rho_count(self, j: int) -> int:
        return (self.stab_count(j) - self.rotations[j - 1]) // 2

    def tb(self, j: int) -> int:
        return -1 - self.lambda_count(j) - self.rho_count(j)

    def truncated(self, m: int) -> Leg:
        return Leg(coefficients=self.coefficients[:m], rotations=self.rotations[:m])

    def mirrored(self) -> Leg:
        return Leg(
            coefficients=self.coefficients, rotations=tuple(-r for r in self.rotations)
        )


class Presentation(BaseModel):
    """Contact surgery diagram on M(-1; r1, r2, r3): three legs, e0 = -1."""

    model_config = ConfigDict(frozen=True)

    legs: tuple[Leg, ...]

    @field_validator("legs")
    @classmethod
    def _three_legs(cls, legs: tuple[Leg, ...]) -> tuple[Leg, ...]:
        if len(legs) != 3:
            raise PresentationError(
                f"three-leg invariant: exactly three legs are supported, got {len(legs)}"
            )
        return legs

    @property
    def r_values(self) -> tuple[Fraction, ...]:
        return tuple(leg.r for leg in self.legs)

    def leg(self, index: int) -> Leg:
        """Leg by 1-based index."""
        return self.legs[index - 1]

    def mirror(self) -> Presentation:
        """Negate every rotation number (swap the roles of the two boundaries)."""
        return Presentation(legs=tuple(leg.mirrored() for leg in self.legs))


class PrefixSign(StrEnum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NONE = "none"


class PrefixData(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int = Field(ge=0)
    sign: PrefixSign
    q: Rational


class OpenBook(BaseModel):
    """Planar open book: boundary components, the one playing outer, and twists."""

    model_config = ConfigDict(frozen=True)

    boundaries: tuple[Hole, ...]
    outer: Hole
    twists: tuple[SignedTwist, ...]
    # Legs the book was translated from, keyed by leg number; dropped by cap.
    source: dict[int, Leg] | None = Field(default=None, exclude=True)

    @model_validator(mode="after")
    def _twists_inside(self) -> OpenBook:
        if self.outer not in self.boundaries:
            raise ValueError(f"outer boundary {self.outer} is not a hole of the book")
        inner = frozenset(self.boundaries) - {self.outer}
        for twist in self.twists:
            if not twist.holes <= inner:
                stray = sort_holes(twist.holes - inner)
                raise ValueError(
                    f"twist encircles holes outside the page: {[h.name for h in stray]}"
                )
        return self

    @property
    def inner_holes(self) -> tuple[Hole, ...]:
        return tuple(h for h in self.boundaries if h != self.outer)

    @property
    def positive_count(self) -> int:
        return sum(1 for t in self.twists if t.sign > 0)

    @property
    def negative_count(self) -> int:
        return sum(1 for t in self.twists if t.sign < 0)


class AbClass(BaseModel):
    """Abelianized mapping class: multiplicities per hole and per hole pair.

    Only nonzero entries are stored, keyed by canonical names, so equality of
    two classes is plain structural equality.
    """

    model_config = ConfigDict(frozen=True)

    universe: tuple[Hole, ...]
    outer: Hole
    singles: dict[str, int]
    pairs: dict[str, int]

    def single(self, hole: Hole) -> int:
        return self.singles.get(hole.name, 0)

    def pair(self, a: Hole, b: Hole) -> int:
        return self.pairs.get(pair_key(a, b), 0)

    @property
    def is_zero(self) -> bool:
        return not self.singles and not self.pairs


class FeasibilityStatus(StrEnum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


class WitnessEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    holes: tuple[Hole, ...]
    multiplicity: int = Field(ge=1)


class FeasibilityResult(BaseModel):
    """Outcome of the positive-factorization search on an abelianized class."""

    model_config = ConfigDict(frozen=True)

    status: FeasibilityStatus
    witness: tuple[WitnessEntry, ...] | None = None
    nodes: int = Field(default=0, ge=0)

    @property
    def feasible(self) -> bool:
        return self.status is FeasibilityStatus.FEASIBLE

    def witness_twists(self) -> list[SignedTwist]:
        twists: list[SignedTwist] = []
        for entry in self.witness or ():
            twists.extend(
                SignedTwist(sign=1, holes=frozenset(entry.holes))
                for _ in range(entry.multiplicity)
            )
        return twists


class SublinkChoice(BaseModel):
    """Truncated positive and negative legs whose values add up to one."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    positive_leg: int = Field(ge=1, le=3)
    negative_leg: int = Field(ge=1, le=3)
    trunc_pos: int = Field(ge=1)
    trunc_neg: int = Field(ge=1)
    s_pos: Rational
    s_neg: Rational

    @model_validator(mode="after")
    def _sums_to_one(self) -> SublinkChoice:
        if self.s_pos + self.s_neg != 1:
            raise ValueError("sublink values must add up to exactly 1")
        return self


class BPattern(BaseModel):
    """Run lengths relating two dual chains."""

    model_config = ConfigDict(frozen=True)

    runs: tuple[int, ...]

    @field_validator("runs")
    @classmethod
    def _even_nonnegative(cls, runs: tuple[int, ...]) -> tuple[int, ...]:
        if not runs or len(runs) % 2:
            raise ValueError("a b-pattern has a positive even number of runs")
        if any(b < 0 for b in runs):
            raise ValueError("runs must be nonnegative")
        return runs

    @property
    def closed_runs(self) -> tuple[int, ...]:
        """The runs with a trailing empty run folded into the run before it.

        In this layout the leg carrying the last stabilization level ends in
        ``-b_m - 2``, so ``(1, 0, 0, 0)`` reads ``(1, 0, 1)``. Two-run patterns
        are returned unchanged.
        """
        if len(self.runs) > 2 and self.runs[-1] == 0:
            return self.runs[:-2] + (self.runs[-2] + 1,)
        return self.runs


class RewriteStep(BaseModel):
    """One daisy relation of the rewrite and the named twists it leaves behind.

    Hole sets are written as seen from the pivot hole of the rewrite. ``D`` is
    the positive twist grown by the step; ``N`` and ``N′`` are the negative
    twists present after it.
    """

    model_config = ConfigDict(frozen=True)

    level: int = Field(ge=1)
    side: Literal["inside", "outside"]
    added: tuple[Hole, ...]
    closing: Hole | None = None
    consumed: tuple[SignedTwist, ...]
    produced: tuple[SignedTwist, ...]
    d: SignedTwist = Field(serialization_alias="D")
    n: SignedTwist | None = Field(default=None, serialization_alias="N")
    n_prime: SignedTwist | None = Field(default=None, serialization_alias="N′")
    negatives: int = Field(ge=0, le=2)


class RewriteResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    pattern: BPattern
    pivot: Hole
    twists: tuple[SignedTwist, ...]
    steps: tuple[RewriteStep, ...]


class TraceCase(StrEnum):
    OUTSIDE = "i"
    OBSTRUCTED = "ii"
    PROCEED = "iii"


class TraceConclusion(StrEnum):
    NO_POSITIVE_FACTORIZATION = "no_positive_factorization"
    OUTSIDE_HYPOTHESES = "outside_hypotheses"


class TraceLevel(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: int = Field(ge=1)
    j: int = Field(ge=1)
    parts_needed: int
    required: int
    available_parts: tuple[int, ...]
    case: TraceCase


class ObstructionTrace(BaseModel):
    """Level-by-level walk of the non-factorization argument."""

    model_config = ConfigDict(frozen=True)

    flipped: bool = False
    third_leg: int | None = None
    first_leg: int | None = None
    second_leg: int | None = None
    levels: tuple[TraceLevel, ...] = ()
    conclusion: TraceConclusion
    reason: str = ""


class ObstructionKind(StrEnum):
    FAILED_OPPOSITE_CHECK = "failed_opposite_check"
    NO_QUALIFYING_PAIR = "no_qualifying_pair"
    TRACE = "trace"


class Obstruction(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: ObstructionKind
    q_values: tuple[Rational, ...] = ()
    trace: ObstructionTrace | None = None


class VerdictStatus(StrEnum):
    FILLABLE = "fillable"
    NOT_FILLABLE = "not_fillable"


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    status: VerdictStatus
    sublink: SublinkChoice | None = None
    geometric_certificate: tuple[SignedTwist, ...] | None = None
    abelian_certificate: FeasibilityResult | None = None
    obstruction: Obstruction | None = None

    @property
    def fillable(self) -> bool:
        return self.status is VerdictStatus.FILLABLE


class SurveyRecord(BaseModel):
    """Verdict for one enumerated structure, with the oracle's answer if checked."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=0)
    rotations: tuple[tuple[int, ...], ...]
    verdict: Verdict
    oracle: FeasibilityStatus | None = None
    agrees: bool | None = None


class SurveySummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    total: int = 0
    fillable: int = 0
    not_fillable: int = 0
    cross_checked: int = 0
    agreements: int = 0
    disagreements: int = 0


class SurveyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    chains: tuple[tuple[int, ...], ...]
    records: tuple[SurveyRecord, ...]
    summary: SurveySummary
