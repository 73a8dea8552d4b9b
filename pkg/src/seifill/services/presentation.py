"""Stabilization bookkeeping and enumeration for surgery presentations."""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from fractions import Fraction
from typing import Any

from ..core.cf import as_chain, cf_eval, cf_expand, parse_rational
from ..errors import PresentationError
from ..models import Leg, PrefixData, PrefixSign, Presentation

log = logging.getLogger("seifill.services.presentation")


def stab_counts(leg: Leg) -> list[tuple[int, int]]:
    """Per unknot ``(|lambda_j|, |rho_j|)``: positive and negative stabilizations."""
    return [(leg.lambda_count(j), leg.rho_count(j)) for j in range(1, leg.n + 1)]


def _unknot_sign(leg: Leg, j: int) -> PrefixSign | None:
    """Sign shared by all stabilizations of unknot ``j``; None when mixed."""
    lam, rho = leg.lambda_count(j), leg.rho_count(j)
    if lam and rho:
        return None
    if lam:
        return PrefixSign.POSITIVE
    if rho:
        return PrefixSign.NEGATIVE
    return PrefixSign.NONE


def one_sided_prefix(leg: Leg) -> PrefixData:
    """Longest run of leading unknots stabilized on a single side.

    Unknots without stabilizations never break the run. The first unknot always
    has at least one stabilization, so its sign fixes the sign of the run.
    """
    sign = _unknot_sign(leg, 1)
    if sign is None:
        return PrefixData(k=0, sign=PrefixSign.NONE, q=Fraction(0))
    k = 1
    for j in range(2, leg.n + 1):
        current = _unknot_sign(leg, j)
        if current is None or current not in (sign, PrefixSign.NONE):
            break
        k = j
    return PrefixData(k=k, sign=sign, q=-1 / cf_eval(leg.coefficients[:k]))


def starts_fully(leg: Leg, sign: PrefixSign) -> bool:
    """Whether the first unknot carries only stabilizations of ``sign``."""
    return _unknot_sign(leg, 1) is sign


def opposite_start_check(presentation: Presentation) -> bool:
    """Some leg starts fully positive and another leg starts fully negative."""
    positive = [
        i for i, leg in enumerate(presentation.legs) if starts_fully(leg, PrefixSign.POSITIVE)
    ]
    negative = [
        i for i, leg in enumerate(presentation.legs) if starts_fully(leg, PrefixSign.NEGATIVE)
    ]
    return any(i != j for i in positive for j in negative)


def rotation_choices(coefficients: Sequence[int]) -> list[list[int]]:
    """Admissible rotation numbers of each unknot, ascending."""
    chain = as_chain(coefficients)
    choices = []
    for j, a in enumerate(chain, start=1):
        stabs = -a - 1 if j == 1 else -a - 2
        choices.append(list(range(-stabs, stabs + 1, 2)))
    return choices


def enumerate_structures(chains: Sequence[Sequence[int]]) -> Iterator[Presentation]:
    """Every rotation assignment on the three chains, in lexicographic order."""
    if len(chains) != 3:
        raise PresentationError(
            f"three-leg invariant: exactly three chains are supported, got {len(chains)}"
        )
    per_leg = [list(itertools.product(*rotation_choices(c))) for c in chains]
    coefficients = [as_chain(c) for c in chains]
    for rotations in itertools.product(*per_leg):
        yield Presentation(
            legs=tuple(
                Leg(coefficients=coeffs, rotations=rots)
                for coeffs, rots in zip(coefficients, rotations, strict=True)
            )
        )


def structure_count(chains: Sequence[Sequence[int]]) -> int:
    """Number of structures ``enumerate_structures`` yields."""
    return math.prod(len(options) for chain in chains for options in rotation_choices(chain))


def leg_from_payload(payload: Mapping[str, Any]) -> Leg:
    """Build a leg from ``{"coeffs": [...], "rot": [...]}`` or ``{"r": "p/q", "rot": [...]}``."""
    if not isinstance(payload, Mapping):
        raise PresentationError("a leg must be a JSON object")
    if "coeffs" in payload:
        coefficients = tuple(payload["coeffs"])
    elif "r" in payload:
        r = parse_rational(payload["r"])
        if not 0 < r < 1:
            raise PresentationError(f"leg value invariant: r must lie in (0,1), got {r}")
        coefficients = cf_expand(-1 / r)
    else:
        raise PresentationError("leg needs either 'coeffs' or 'r'")
    if "rot" not in payload:
        raise PresentationError("leg needs 'rot'")
    return Leg(coefficients=coefficients, rotations=tuple(payload["rot"]))


def presentation_from_payload(payload: Mapping[str, Any]) -> Presentation:
    """Parse the presentation JSON schema ``{"legs": [...]}``."""
    legs = payload.get("legs") if isinstance(payload, Mapping) else None
    if not isinstance(legs, list):
        raise PresentationError("presentation needs a 'legs' list")
    presentation = Presentation(legs=tuple(leg_from_payload(leg) for leg in legs))
    log.debug("Parsed presentation with r=%s", [str(r) for r in presentation.r_values])
    return presentation


def chains_from_payload(payload: Mapping[str, Any]) -> list[tuple[int, ...]]:
    """Survey input: ``{"chains": [[...], [...], [...]]}`` or ``{"r": ["1/3", ...]}``."""
    if not isinstance(payload, Mapping):
        raise PresentationError("survey input must be a JSON object")
    if "chains" in payload:
        chains = [as_chain(c) for c in payload["chains"]]
    elif "r" in payload:
        values = [parse_rational(r) for r in payload["r"]]
        if any(not 0 < r < 1 for r in values):
            raise PresentationError("leg value invariant: every r must lie in (0,1)")
        chains = [cf_expand(-1 / r) for r in values]
    else:
        raise PresentationError("survey input needs 'chains' or 'r'")
    if len(chains) != 3:
        raise PresentationError(
            f"three-leg invariant: exactly three chains are supported, got {len(chains)}"
        )
    return chains
