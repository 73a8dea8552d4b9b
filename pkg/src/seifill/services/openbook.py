"""Planar open books read off the surgery presentation.

The page is a disk with holes. ``rho^in`` is the inner boundary of the annulus
carrying the core, ``lambda^out`` the outer one; every stabilization adds a
hole (Lambda for positive, Rho for negative) together with a positive twist
around it. Twists are stored by the holes they encircle as seen from the
current outer boundary.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping

from ..errors import DomainError, UnknownHoleError
from ..models import (
    INNER,
    OUTER_TOKEN,
    Hole,
    HoleKind,
    Leg,
    OpenBook,
    Presentation,
    SignedTwist,
    SublinkChoice,
    sort_holes,
)

log = logging.getLogger("seifill.services.openbook")


def leg_holes(index: int, leg: Leg) -> tuple[list[list[Hole]], list[list[Hole]]]:
    """Lambda and Rho holes of a leg, grouped by level."""
    lambdas: list[list[Hole]] = []
    rhos: list[list[Hole]] = []
    for j in range(1, leg.n + 1):
        lambdas.append(
            [
                Hole(kind=HoleKind.LAMBDA, leg=index, level=j, index=c)
                for c in range(1, leg.lambda_count(j) + 1)
            ]
        )
        rhos.append(
            [
                Hole(kind=HoleKind.RHO, leg=index, level=j, index=c)
                for c in range(1, leg.rho_count(j) + 1)
            ]
        )
    return lambdas, rhos


def translate_legs(legs: Mapping[int, Leg]) -> OpenBook:
    """Open book of a diagram with the given legs, keyed by leg number."""
    lambdas: dict[int, list[list[Hole]]] = {}
    rhos: dict[int, list[list[Hole]]] = {}
    for index, leg in legs.items():
        lambdas[index], rhos[index] = leg_holes(index, leg)

    all_rho = {h for levels in rhos.values() for level in levels for h in level}
    all_lambda = {h for levels in lambdas.values() for level in levels for h in level}

    twists = [SignedTwist(sign=-1, holes=frozenset({INNER} | all_rho), label="core")]
    for index, leg in legs.items():
        foreign_rho = {
            h
            for other, levels in rhos.items()
            if other != index
            for level in levels
            for h in level
        }
        for j in range(1, leg.n + 1):
            own_rho = {h for level in rhos[index][j:] for h in level}
            own_lambda = {h for level in lambdas[index][:j] for h in level}
            twists.append(
                SignedTwist(
                    sign=1,
                    holes=frozenset({INNER} | foreign_rho | own_rho | own_lambda),
                    label=f"leg{index}.unknot{j}",
                )
            )
    for hole in sort_holes(all_lambda | all_rho):
        twists.append(SignedTwist(sign=1, holes=frozenset({hole}), label=f"stab {hole.name}"))

    book = OpenBook(
        boundaries=sort_holes({INNER, OUTER_TOKEN} | all_lambda | all_rho),
        outer=OUTER_TOKEN,
        twists=tuple(twists),
        source=dict(legs),
    )
    log.debug(
        "Translated %d legs into %d holes and %d twists",
        len(legs),
        len(book.boundaries),
        len(book.twists),
    )
    return book


def translate(presentation: Presentation) -> OpenBook:
    """Open book of a three-leg presentation, outer boundary ``lambda^out``."""
    return translate_legs({i: leg for i, leg in enumerate(presentation.legs, start=1)})


def sublink_legs(presentation: Presentation, choice: SublinkChoice) -> dict[int, Leg]:
    """The two truncated legs of a sublink, keyed by their original numbers."""
    return {
        choice.positive_leg: presentation.leg(choice.positive_leg).truncated(choice.trunc_pos),
        choice.negative_leg: presentation.leg(choice.negative_leg).truncated(choice.trunc_neg),
    }


def translate_sublink(presentation: Presentation, choice: SublinkChoice) -> OpenBook:
    return translate_legs(sublink_legs(presentation, choice))


def reroot(book: OpenBook, new_outer: Hole) -> OpenBook:
    """Let another boundary component play the outer boundary.

    A twist whose stored set contains the new outer hole is rewritten as the
    complementary set of the sphere, which then contains the old outer hole.
    """
    if new_outer not in book.boundaries:
        raise UnknownHoleError(f"cannot reroot at unknown hole {new_outer}")
    if new_outer == book.outer:
        return book
    everything = frozenset(book.boundaries)
    twists = []
    for twist in book.twists:
        holes = twist.holes
        if new_outer in holes:
            holes = everything - holes - {new_outer}
        twists.append(SignedTwist(sign=twist.sign, holes=holes, label=twist.label))
    return OpenBook(
        boundaries=book.boundaries,
        outer=new_outer,
        twists=tuple(twists),
        source=book.source,
    )


def cap(book: OpenBook, holes: Iterable[Hole]) -> OpenBook:
    """Cap off holes: restrict every twist and cancel opposite twists on equal sets."""
    capped = frozenset(holes)
    if not capped:
        return book
    unknown = capped - frozenset(book.boundaries)
    if unknown:
        raise UnknownHoleError(f"cannot cap unknown holes {[h.name for h in sort_holes(unknown)]}")
    if book.outer in capped:
        raise DomainError(f"cannot cap the outer boundary {book.outer}")

    restricted: list[SignedTwist] = []
    for twist in book.twists:
        remaining = twist.holes - capped
        if remaining:
            restricted.append(SignedTwist(sign=twist.sign, holes=remaining, label=twist.label))

    cancelled: set[int] = set()
    for i, twist in enumerate(restricted):
        if twist.sign > 0 or i in cancelled:
            continue
        for j, other in enumerate(restricted):
            if j not in cancelled and other.sign > 0 and other.holes == twist.holes:
                cancelled.update((i, j))
                break
    survivors = tuple(t for i, t in enumerate(restricted) if i not in cancelled)
    return OpenBook(
        boundaries=tuple(h for h in book.boundaries if h not in capped),
        outer=book.outer,
        twists=survivors,
    )


def canonical_twists(book: OpenBook) -> tuple[SignedTwist, ...]:
    """Twists sorted for stable serialization."""
    return tuple(sorted(book.twists, key=SignedTwist.sort_key))
