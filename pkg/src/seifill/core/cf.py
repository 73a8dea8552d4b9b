"""Negative continued fractions over exact rationals.

A chain ``[a1, ..., an]`` stands for ``a1 - 1/(a2 - 1/(... - 1/an))``. Contact
legs use chains with every entry <= -2; framed chains met during blow-downs may
hold any integers.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from functools import lru_cache

from ..errors import ChainEvaluationError, DomainError

Chain = tuple[int, ...]


def parse_rational(value: object) -> Fraction:
    """Read ``"p/q"`` strings, ints and Fractions into a normalized Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def as_chain(entries: Iterable[int]) -> Chain:
    """Validate a contact-leg chain: nonempty, every entry <= -2."""
    chain = tuple(int(a) for a in entries)
    if not chain:
        raise DomainError("chain must be nonempty")
    bad = [a for a in chain if a > -2]
    if bad:
        raise DomainError(f"chain entries must be <= -2, got {list(chain)}")
    return chain


def cf_expand(x: Fraction | int | str) -> Chain:
    """Expand ``x < -1`` into its unique chain with entries <= -2."""
    x = parse_rational(x)
    if x >= -1:
        raise DomainError(f"cf_expand needs x < -1, got {format_rational(x)}")
    entries: list[int] = []
    while True:
        a = math.floor(x)
        entries.append(a)
        u = x - a
        if u == 0:
            return tuple(entries)
        x = -1 / u


def cf_eval(entries: Sequence[int]) -> Fraction:
    """Exact value of a (possibly framed) chain."""
    if not entries:
        raise DomainError("cannot evaluate an empty chain")
    value = Fraction(entries[-1])
    for a in reversed(entries[:-1]):
        if value == 0:
            raise ChainEvaluationError(f"zero denominator while evaluating {list(entries)}")
        value = a - 1 / value
    return value


def chain_value(chain: Sequence[int]) -> Fraction:
    """``s = -1/cf_eval(chain)``, which lies in (0, 1) for contact legs."""
    return -1 / cf_eval(as_chain(chain))


def truncation_values(chain: Sequence[int]) -> list[Fraction]:
    """Values of the prefixes ``[a1..am]`` for m = 1..n, strictly increasing."""
    chain = as_chain(chain)
    return [-1 / cf_eval(chain[:m]) for m in range(1, len(chain) + 1)]


def dual_chain(chain: Sequence[int]) -> Chain:
    """The chain whose value complements ``chain``'s to one."""
    s = chain_value(chain)
    if not 0 < s < 1:
        raise DomainError(f"dual_chain needs s in (0,1), got {format_rational(s)}")
    return cf_expand(-1 / (1 - s))


def blowdown_to_zero(framed: Sequence[int]) -> bool:
    """Whether blowing down +-1 entries can reduce the chain to ``[0]``.

    Blowing down a -1 removes it and adds 1 to each neighbour; a +1 subtracts 1.
    The neighbours become adjacent, so the chain stays linear.
    """
    return _reduces_to_zero(tuple(int(a) for a in framed))


@lru_cache(maxsize=65536)
def _reduces_to_zero(chain: Chain) -> bool:
    if chain == (0,):
        return True
    for i, entry in enumerate(chain):
        if entry not in (-1, 1):
            continue
        shift = -entry
        reduced = list(chain[:i] + chain[i + 1 :])
        if i > 0:
            reduced[i - 1] += shift
        if i < len(chain) - 1:
            reduced[i] += shift
        if reduced and _reduces_to_zero(tuple(reduced)):
            return True
    return False


def find_truncation_pair(
    chain_a: Sequence[int], chain_b: Sequence[int]
) -> tuple[int, int] | None:
    """Lexicographically smallest 1-indexed prefix lengths whose values sum to 1."""
    values_a = truncation_values(chain_a)
    values_b = truncation_values(chain_b)
    for i, sa in enumerate(values_a, start=1):
        for j, sb in enumerate(values_b, start=1):
            if sa + sb == 1:
                return i, j
    return None
