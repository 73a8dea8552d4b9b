"""Positive factorizations of sublink books built from dual chains.

The leg starting with -2 has its twists inside the core twist N; the other
leg's twists go around it. The rewrite alternates between the two legs. Odd
steps are daisy relations seen from the book's outer boundary: they push N
over the next level of outside holes. Even steps are daisy relations seen
from the last hole of the first outside level (the pivot): they create, and
then push, a second negative twist N' over the next level of inside holes.
Each step grows the positive twist D by the holes it adds. The last step
also takes in the far boundary, so D cancels one negative twist and the other
one cancels the twist parallel to the pivot.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable, Sequence

from ..core.cf import as_chain, chain_value
from ..errors import CertificateError, DomainError
from ..models import (
    INNER,
    OUTER_TOKEN,
    AbClass,
    BPattern,
    Hole,
    HoleKind,
    Leg,
    OpenBook,
    RewriteResult,
    RewriteStep,
    SignedTwist,
    sort_holes,
)
from .abmap import ab_class, ab_class_of_twists, ab_equal
from .openbook import leg_holes, reroot

log = logging.getLogger("seifill.services.factorization")


def synthesize_chains(pattern: BPattern) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The (positive, negative) dual chains described by a b-pattern."""
    runs = pattern.runs
    positive = [runs[0] + 2]
    negative = [2] * runs[0]
    for k in range(1, len(runs)):
        b = runs[k]
        if k % 2:
            positive.extend([2] * b)
            negative.append(b + 3)
        else:
            positive.append(b + 3)
            negative.extend([2] * b)
    negative[-1] -= 1
    return tuple(-x for x in positive), tuple(-x for x in negative)


def extract_bpattern(l_pos: Sequence[int], l_neg: Sequence[int]) -> BPattern:
    """Run lengths of a dual pair; raises DomainError when the pair is not dual.

    The runs read ``l_pos = [b1+2, 2^b2, b3+3, 2^b4, ...]`` and
    ``l_neg = [2^b1, b2+3, 2^b3, b4+3, ...]`` (magnitudes), always an even
    number of them, with one endpoint rule: the final entry of ``l_neg`` is one
    less than the layout gives. A trailing empty run therefore stands for a
    final -2, so ``([-3, -3], [-2, -3, -2])`` reads ``(1, 0, 0, 0)``.
    ``BPattern.closed_runs`` gives the other reading, ``(1, 0, 1)``, where the
    last ``-b_m - 2`` entry absorbs that final -2.
    """
    l_pos, l_neg = as_chain(l_pos), as_chain(l_neg)
    if chain_value(l_pos) + chain_value(l_neg) != 1:
        raise DomainError(f"duality violation: {list(l_pos)} and {list(l_neg)} are not dual")

    def violation() -> DomainError:
        return DomainError(
            f"duality violation: cannot read runs of {list(l_pos)} and {list(l_neg)}"
        )

    p = [-a for a in l_pos]
    q = [-a for a in l_neg]
    q[-1] += 1
    runs = [p[0] - 2]
    ip, iq = 1, 0
    while True:
        run = runs[-1]
        if q[iq : iq + run] != [2] * run or iq + run >= len(q):
            raise violation()
        iq += run
        if q[iq] < 3:
            raise violation()
        runs.append(q[iq] - 3)
        iq += 1

        run = runs[-1]
        if p[ip : ip + run] != [2] * run:
            raise violation()
        ip += run
        if ip == len(p):
            break
        if p[ip] < 3:
            raise violation()
        runs.append(p[ip] - 3)
        ip += 1
    if iq != len(q):
        raise violation()

    pattern = BPattern(runs=tuple(runs))
    if synthesize_chains(pattern) != (l_pos, l_neg):
        raise violation()
    return pattern


def _split_legs(book: OpenBook) -> tuple[int, Leg, int, Leg]:
    if book.source is None or len(book.source) != 2:
        raise DomainError("daisy rewrite needs a book translated from a two-leg sublink")
    if book.outer.kind is not HoleKind.OUTER:
        raise DomainError("daisy rewrite works in the initial perspective")
    positive = [
        (i, leg)
        for i, leg in book.source.items()
        if all(leg.rho_count(j) == 0 for j in range(1, leg.n + 1))
    ]
    negative = [
        (i, leg)
        for i, leg in book.source.items()
        if all(leg.lambda_count(j) == 0 for j in range(1, leg.n + 1))
    ]
    for pi, pos in positive:
        for ni, neg in negative:
            if pi != ni:
                return pi, pos, ni, neg
    raise DomainError(
        "daisy rewrite needs one leg stabilized only positively and one only negatively"
    )


def _union(groups: Iterable[frozenset[Hole]]) -> frozenset[Hole]:
    return frozenset().union(*groups)


class _Frame:
    """Hole levels of the two legs and the boundaries the steps revolve around.

    ``core`` sits inside every twist of the inside leg, ``far`` is the outer
    boundary of the book, and ``pivot`` is the hole the rewrite is seen from.
    """

    def __init__(
        self,
        core: Hole,
        far: Hole,
        inside: list[frozenset[Hole]],
        outside: list[frozenset[Hole]],
    ):
        if not inside or len(inside[0]) != 1 or not outside:
            raise CertificateError("daisy rewrite needs one hole on the first inside level")
        self.core = core
        self.far = far
        self.inside = inside
        self.outside = outside
        self.pivot = sort_holes(outside[0])[-1]

    def plan(self, level: int) -> tuple[str, frozenset[Hole], frozenset[Hole], Hole]:
        """Side, center set, newly added holes and closing boundary of a step."""
        q = (level + 1) // 2
        if level % 2:
            if q > len(self.outside):
                raise CertificateError(f"daisy step {level} ran out of outside levels")
            center = _union(self.inside[q:]) | {self.core}
            return "inside", center, self.outside[q - 1] - {self.pivot}, self.far
        if q >= len(self.inside):
            raise CertificateError(f"daisy step {level} ran out of inside levels")
        center = _union(self.outside[q:]) | {self.far}
        return "outside", center, self.inside[q], self.core

    def templates(
        self, level: int
    ) -> tuple[frozenset[Hole], frozenset[Hole], frozenset[Hole] | None]:
        """Hole sets of D, N and N' after a step that does not close the rewrite."""
        q = (level + 1) // 2
        inner_levels = _union(self.inside[: q if level % 2 else q + 1])
        outer_levels = _union(self.outside[:q]) - {self.pivot}
        d = inner_levels | outer_levels
        n = _union(self.inside) | outer_levels | {self.core}
        if level < 2:
            return d, n, None
        n_prime = (_union(self.outside) - {self.pivot}) | inner_levels | {self.far}
        return d, n, n_prime


class _Multiset:
    """The running signed twists, as seen from the pivot."""

    def __init__(self, twists: Iterable[SignedTwist]):
        self.twists = list(twists)

    def count(self, holes: frozenset[Hole]) -> int:
        return sum(1 for t in self.twists if t.sign > 0 and t.holes == holes)

    def find(self, holes: frozenset[Hole], sign: int) -> SignedTwist | None:
        return next((t for t in self.twists if t.sign == sign and t.holes == holes), None)

    def _pop(self, holes: frozenset[Hole], sign: int) -> SignedTwist | None:
        twist = self.find(holes, sign)
        if twist is not None:
            self.twists.remove(twist)
        return twist

    def take(self, holes: frozenset[Hole], label: str) -> tuple[SignedTwist, bool]:
        """Remove a positive twist; a missing one is left behind as a negative twist."""
        found = self._pop(holes, 1)
        if found is not None:
            return found, True
        twist = SignedTwist(sign=-1, holes=holes, label=label)
        self.twists.append(twist)
        return twist, False

    def give(self, holes: frozenset[Hole], label: str) -> tuple[SignedTwist, bool]:
        """Add a positive twist, cancelling a negative twist on the same holes."""
        found = self._pop(holes, -1)
        if found is not None:
            return found, True
        twist = SignedTwist(sign=1, holes=holes, label=label)
        self.twists.append(twist)
        return twist, False

    @property
    def negatives(self) -> list[SignedTwist]:
        return [t for t in self.twists if t.sign < 0]


def _apply_daisy(
    multiset: _Multiset,
    center: frozenset[Hole],
    petals: list[frozenset[Hole]],
    level: int,
) -> tuple[frozenset[Hole], list[SignedTwist], list[SignedTwist]]:
    """C^(p-1) P_1 ... P_p U = (C+P_1) ... (C+P_p) (P_1+...+P_p), U = C+P_1+...+P_p."""
    grown = _union(petals)
    negative_label = "N" if level % 2 else "N′"
    consumed: list[SignedTwist] = []
    produced: list[SignedTwist] = []
    for holes in [center] * (len(petals) - 1) + petals + [center | grown]:
        twist, taken = multiset.take(holes, negative_label)
        (consumed if taken else produced).append(twist)
    right = [(center | petal, f"daisy{level}") for petal in petals]
    for holes, label in [*right, (grown, f"D{level}")]:
        twist, cancelled = multiset.give(holes, label)
        (consumed if cancelled else produced).append(twist)
    return grown, consumed, produced


def daisy_rewrite(book: OpenBook) -> RewriteResult:
    """All-positive factorization of a sublink book, with its step schedule."""
    pos_index, pos_leg, neg_index, neg_leg = _split_legs(book)
    lambdas = [frozenset(level) for level in leg_holes(pos_index, pos_leg)[0] if level]
    rhos = [frozenset(level) for level in leg_holes(neg_index, neg_leg)[1] if level]
    if neg_leg.coefficients[0] == -2:
        pattern = extract_bpattern(pos_leg.coefficients, neg_leg.coefficients)
        frame = _Frame(INNER, OUTER_TOKEN, rhos, lambdas)
    else:
        pattern = extract_bpattern(neg_leg.coefficients, pos_leg.coefficients)
        frame = _Frame(OUTER_TOKEN, INNER, lambdas, rhos)

    target = ab_class(book)
    multiset = _Multiset(reroot(book, frame.pivot).twists)
    grown = frame.inside[0]
    steps: list[RewriteStep] = []
    level = 0
    closing: Hole | None = None
    while closing is None:
        level += 1
        side, center, added, far_side = frame.plan(level)
        copies = multiset.count(center)
        if len(added) == copies - 1:
            closing = far_side
        elif len(added) != copies:
            raise CertificateError(
                f"daisy step {level} pairs {copies} parallel twists with {len(added)} new holes"
            )
        petals = [grown, *(frozenset({h}) for h in sort_holes(added))]
        if closing is not None:
            petals.append(frozenset({closing}))
        grown, consumed, produced = _apply_daisy(multiset, center, petals, level)

        n, n_prime = _check_templates(frame, multiset, level, grown, closing is not None)
        _check_balance(multiset, book, frame.pivot, target, level)
        steps.append(
            RewriteStep(
                level=level,
                side=side,
                added=sort_holes(added),
                closing=closing,
                consumed=tuple(consumed),
                produced=tuple(produced),
                d=SignedTwist(sign=1, holes=grown, label=f"D{level}"),
                n=n,
                n_prime=n_prime,
                negatives=len(multiset.negatives),
            )
        )
        log.debug(
            "Daisy step %d (%s) added %s with %d parallel twists",
            level,
            side,
            [h.name for h in sort_holes(added)],
            copies,
        )

    pivot_book = OpenBook(
        boundaries=book.boundaries, outer=frame.pivot, twists=tuple(multiset.twists)
    )
    twists = tuple(
        sorted(
            (
                SignedTwist(sign=1, holes=t.holes, label="daisy")
                for t in reroot(pivot_book, book.outer).twists
            ),
            key=SignedTwist.sort_key,
        )
    )
    if not verify_certificate(book, twists):
        raise CertificateError("daisy rewrite does not reproduce the sublink book")
    log.debug(
        "Daisy rewrite of %s finished in %d steps with %d positive twists",
        pattern.runs,
        len(steps),
        len(twists),
    )
    return RewriteResult(pattern=pattern, pivot=frame.pivot, twists=twists, steps=tuple(steps))


def _check_templates(
    frame: _Frame, multiset: _Multiset, level: int, grown: frozenset[Hole], closed: bool
) -> tuple[SignedTwist | None, SignedTwist | None]:
    """The negative twists and D left by a step match the level's templates."""
    negatives = multiset.negatives
    if closed:
        if negatives:
            names = [list(t.names) for t in negatives]
            raise CertificateError(f"daisy step {level} closed with negative twists {names}")
        return None, None

    d, n, n_prime = frame.templates(level)
    expected = Counter(s for s in (n, n_prime) if s is not None)
    if grown != d or Counter(t.holes for t in negatives) != expected:
        raise CertificateError(
            f"daisy step {level} left D={[h.name for h in sort_holes(grown)]} and "
            f"negatives {[list(t.names) for t in negatives]} off their templates"
        )
    return multiset.find(n, -1), None if n_prime is None else multiset.find(n_prime, -1)


def _check_balance(
    multiset: _Multiset, book: OpenBook, pivot: Hole, target: AbClass, level: int
) -> None:
    """The running multiset still has the class of the input book."""
    running = OpenBook(boundaries=book.boundaries, outer=pivot, twists=tuple(multiset.twists))
    if not ab_equal(ab_class(reroot(running, book.outer)), target):
        raise CertificateError(f"daisy step {level} broke the multiplicity balance")


def verify_certificate(book: OpenBook, candidate: Sequence[SignedTwist]) -> bool:
    """Whether an all-positive multiset has the book's abelianized class."""
    if any(t.sign < 0 for t in candidate):
        raise DomainError("a certificate must consist of positive twists")
    replay = ab_class_of_twists(candidate, book.inner_holes, book.outer)
    return ab_equal(replay, ab_class(book))
