"""Multiplicity invariants of twist multisets.

A twist contributes its sign to ``m_a`` for every hole ``a`` it encircles and
to ``m_ab`` for every pair of such holes. Together these numbers determine the
abelianized class.
"""

from __future__ import annotations

import itertools
from collections import Counter
from collections.abc import Iterable, Sequence

from ...errors import UniverseMismatchError
from ...models import AbClass, Hole, OpenBook, SignedTwist, pair_key, sort_holes


def ab_class_of_twists(
    twists: Iterable[SignedTwist], universe: Sequence[Hole], outer: Hole
) -> AbClass:
    """Class of a twist multiset on the page with the given inner holes."""
    ordered = sort_holes(universe)
    inside = frozenset(ordered)
    singles: Counter[Hole] = Counter()
    pairs: Counter[tuple[Hole, Hole]] = Counter()
    for twist in twists:
        if not twist.holes <= inside:
            raise UniverseMismatchError(
                f"twist {list(twist.names)} leaves the page with outer {outer}"
            )
        holes = sort_holes(twist.holes)
        for hole in holes:
            singles[hole] += twist.sign
        for a, b in itertools.combinations(holes, 2):
            pairs[(a, b)] += twist.sign
    return AbClass(
        universe=ordered,
        outer=outer,
        singles={h.name: singles[h] for h in ordered if singles[h]},
        pairs={
            pair_key(a, b): pairs[(a, b)]
            for a, b in itertools.combinations(ordered, 2)
            if pairs[(a, b)]
        },
    )


def ab_class(book: OpenBook) -> AbClass:
    return ab_class_of_twists(book.twists, book.inner_holes, book.outer)


def ab_equal(x: AbClass, y: AbClass) -> bool:
    """Equality of two classes over the same page."""
    if x.universe != y.universe or x.outer != y.outer:
        raise UniverseMismatchError("classes live on different pages")
    return x.singles == y.singles and x.pairs == y.pairs


def lantern_decompose(twist: SignedTwist) -> list[SignedTwist]:
    """Rewrite a twist around r >= 3 holes into pairwise and boundary twists.

    Each of the r(r-1)/2 pairs gets a twist of the same sign, and each hole gets
    r - 2 boundary twists of the opposite sign.
    """
    holes = sort_holes(twist.holes)
    r = len(holes)
    if r < 3:
        return [twist]
    pieces = [
        SignedTwist(sign=twist.sign, holes=frozenset(pair), label=twist.label)
        for pair in itertools.combinations(holes, 2)
    ]
    for hole in holes:
        pieces.extend(
            SignedTwist(sign=-twist.sign, holes=frozenset({hole}), label=twist.label)
            for _ in range(r - 2)
        )
    return pieces
