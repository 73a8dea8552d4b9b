"""Fillability of small Seifert fibered spaces from their surgery presentation.

A structure is fillable exactly when a positively stabilized leg and a
negatively stabilized leg have one-sided prefixes whose values add up to one.
Fillable verdicts carry a daisy factorization of that sublink and, when the
book is small enough, the oracle's factorization of the whole book. The
other verdicts carry the strongest obstruction available.
"""

from __future__ import annotations

import logging
from fractions import Fraction

from ..core.cf import truncation_values
from ..core.protocols import CertificateBuilder, FeasibilityOracle
from ..errors import CertificateError, OracleLimitError
from ..models import (
    Obstruction,
    ObstructionKind,
    ObstructionTrace,
    PrefixSign,
    Presentation,
    SublinkChoice,
    TraceCase,
    TraceConclusion,
    TraceLevel,
    Verdict,
    VerdictStatus,
)
from .abmap import ab_class
from .abmap.oracle import DEFAULT_MAX_HOLES, PositiveFactorizationOracle
from .factorization import daisy_rewrite, verify_certificate
from .openbook import translate, translate_sublink
from .presentation import one_sided_prefix, opposite_start_check, starts_fully

log = logging.getLogger("seifill.services.fillability")


def _start_legs(presentation: Presentation, sign: PrefixSign) -> list[int]:
    return [
        i for i, leg in enumerate(presentation.legs, start=1) if starts_fully(leg, sign)
    ]


def find_sublinks(presentation: Presentation) -> list[SublinkChoice]:
    """Every dual pair of one-sided prefixes, ordered by legs then lengths."""
    choices: list[SublinkChoice] = []
    for pos in _start_legs(presentation, PrefixSign.POSITIVE):
        pos_leg = presentation.leg(pos)
        pos_values = truncation_values(pos_leg.coefficients[: one_sided_prefix(pos_leg).k])
        for neg in _start_legs(presentation, PrefixSign.NEGATIVE):
            neg_leg = presentation.leg(neg)
            neg_values = truncation_values(
                neg_leg.coefficients[: one_sided_prefix(neg_leg).k]
            )
            for m_pos, s_pos in enumerate(pos_values, start=1):
                for m_neg, s_neg in enumerate(neg_values, start=1):
                    if s_pos + s_neg == 1:
                        choices.append(
                            SublinkChoice(
                                positive_leg=pos,
                                negative_leg=neg,
                                trunc_pos=m_pos,
                                trunc_neg=m_neg,
                                s_pos=s_pos,
                                s_neg=s_neg,
                            )
                        )
    return choices


def q_values(presentation: Presentation) -> tuple[Fraction, ...]:
    return tuple(one_sided_prefix(leg).q for leg in presentation.legs)


def q_condition(presentation: Presentation) -> tuple[int, int] | None:
    """First (positive, negative) pair of fully stabilized starts with q-sum >= 1."""
    qs = q_values(presentation)
    for pos in _start_legs(presentation, PrefixSign.POSITIVE):
        for neg in _start_legs(presentation, PrefixSign.NEGATIVE):
            if qs[pos - 1] + qs[neg - 1] >= 1:
                return pos, neg
    return None


def _outside(reason: str, **fields) -> ObstructionTrace:
    return ObstructionTrace(
        conclusion=TraceConclusion.OUTSIDE_HYPOTHESES, reason=reason, **fields
    )


def obstruction_trace(presentation: Presentation) -> ObstructionTrace:
    """Walk the levels of the non-factorization argument.

    The leg starting fully positive plays the third leg; the other two are
    ordered by their q-values. Each level ``J`` of the third leg asks for
    partitions of the first leg's Rho holes into exactly ``J + 1`` parts.
    """
    flipped = False
    if len(_start_legs(presentation, PrefixSign.POSITIVE)) >= 2:
        presentation = presentation.mirror()
        flipped = True
    positive = _start_legs(presentation, PrefixSign.POSITIVE)
    negative = _start_legs(presentation, PrefixSign.NEGATIVE)
    if len(positive) != 1 or not negative:
        return _outside(
            "needs exactly one leg starting fully positive and one starting fully negative",
            flipped=flipped,
        )

    third = positive[0]
    qs = q_values(presentation)
    first, second = sorted((i for i in (1, 2, 3) if i != third), key=lambda i: -qs[i - 1])
    roles = {"flipped": flipped, "third_leg": third, "first_leg": first, "second_leg": second}
    guarded = q_condition(presentation) is not None

    third_leg = presentation.leg(third)
    k3 = one_sided_prefix(third_leg).k
    first_leg = presentation.leg(first)
    parts: list[int] = []
    total = 1
    for j in range(1, one_sided_prefix(first_leg).k + 1):
        total += first_leg.rho_count(j)
        parts.append(total)
    unused = list(parts)

    levels: list[TraceLevel] = []
    previous = 0
    while True:
        candidates = [
            j
            for j in range(previous + 1, k3 + 1)
            if third_leg.lambda_count(j) > (1 if j == 1 else 0)
        ]
        if not candidates:
            break
        j = candidates[0]
        previous = j
        needed = j + 1
        required = third_leg.lambda_count(j) - (1 if j == 1 else 0)
        exact = [p for p in unused if p == needed]

        if any(p < needed for p in unused):
            case = TraceCase.OUTSIDE
        elif len(exact) < required:
            case = TraceCase.OBSTRUCTED
        else:
            case = TraceCase.PROCEED
        levels.append(
            TraceLevel(
                level=len(levels) + 1,
                j=j,
                parts_needed=needed,
                required=required,
                available_parts=tuple(unused),
                case=case,
            )
        )
        log.debug("Trace level %d at j=%d: %s", len(levels), j, case.value)

        if case is TraceCase.OUTSIDE:
            return _outside(
                f"a partition with fewer than {needed} parts is still unused",
                levels=tuple(levels),
                **roles,
            )
        if case is TraceCase.OBSTRUCTED:
            if guarded:
                return _outside(
                    "partitions run out although the q-condition holds",
                    levels=tuple(levels),
                    **roles,
                )
            return ObstructionTrace(
                conclusion=TraceConclusion.NO_POSITIVE_FACTORIZATION,
                reason=f"level {len(levels)} needs {required} partitions into {needed} parts",
                levels=tuple(levels),
                **roles,
            )
        for _ in range(required):
            unused.remove(needed)

    return _outside("every level found its partitions", levels=tuple(levels), **roles)


class FillabilityService:
    """Decides fillability and assembles certificates and obstructions."""

    def __init__(
        self,
        oracle: FeasibilityOracle | None = None,
        certificate_builder: CertificateBuilder | None = None,
        max_holes: int = DEFAULT_MAX_HOLES,
    ):
        self.oracle = oracle or PositiveFactorizationOracle(max_holes=max_holes)
        self.certificate_builder = certificate_builder or daisy_rewrite

    def decide(self, presentation: Presentation) -> Verdict:
        sublinks = find_sublinks(presentation)
        if sublinks:
            return self._fillable(presentation, sublinks[0])
        return Verdict(
            status=VerdictStatus.NOT_FILLABLE, obstruction=self._obstruction(presentation)
        )

    def _fillable(self, presentation: Presentation, choice: SublinkChoice) -> Verdict:
        sublink_book = translate_sublink(presentation, choice)
        rewrite = self.certificate_builder(sublink_book)
        if not verify_certificate(sublink_book, rewrite.twists):
            raise CertificateError("sublink certificate does not verify")

        book = translate(presentation)
        try:
            abelian = self.oracle.solve(ab_class(book))
        except OracleLimitError as exc:
            log.info("Skipping full-book certificate: %s", exc)
            abelian = None
        return Verdict(
            status=VerdictStatus.FILLABLE,
            sublink=choice,
            geometric_certificate=rewrite.twists,
            abelian_certificate=abelian,
        )

    @staticmethod
    def _obstruction(presentation: Presentation) -> Obstruction:
        trace = obstruction_trace(presentation)
        if trace.conclusion is TraceConclusion.NO_POSITIVE_FACTORIZATION:
            return Obstruction(kind=ObstructionKind.TRACE, trace=trace)
        if not opposite_start_check(presentation):
            return Obstruction(kind=ObstructionKind.FAILED_OPPOSITE_CHECK)
        return Obstruction(
            kind=ObstructionKind.NO_QUALIFYING_PAIR, q_values=q_values(presentation)
        )


def decide(
    presentation: Presentation,
    *,
    max_holes: int = DEFAULT_MAX_HOLES,
    oracle: FeasibilityOracle | None = None,
) -> Verdict:
    """Fillability verdict of ``presentation`` with certificates or obstruction."""
    return FillabilityService(oracle=oracle, max_holes=max_holes).decide(presentation)
