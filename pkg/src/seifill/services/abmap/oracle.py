"""Branch-and-bound search for positive factorizations of an abelianized class.

A positive factorization is a multiset of hole sets. Sets with two or more
holes must cover every pair multiplicity exactly; whatever single multiplicity
is left over is then made up by boundary twists. The search always covers the
first pair that still has weight, choosing among the cliques of positive pairs
around it, largest first.
"""

from __future__ import annotations

import itertools
import logging

from ...errors import OracleLimitError
from ...models import (
    AbClass,
    FeasibilityResult,
    FeasibilityStatus,
    WitnessEntry,
)
from .classes import ab_class_of_twists, ab_equal

log = logging.getLogger("seifill.services.abmap.oracle")

DEFAULT_MAX_HOLES = 14


class _Search:
    """Mutable search state over hole indices ``0..n-1``."""

    def __init__(self, singles: list[int], weights: list[list[int]]):
        self.n = len(singles)
        self.capacity = list(singles)
        self.weights = weights
        self.chosen: list[tuple[int, ...]] = []
        self.failed: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
        self.nodes = 0

    def _state(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        flat = tuple(
            self.weights[i][j] for i in range(self.n) for j in range(i + 1, self.n)
        )
        return flat, tuple(self.capacity)

    def _first_edge(self) -> tuple[int, int] | None:
        for i in range(self.n):
            row = self.weights[i]
            for j in range(i + 1, self.n):
                if row[j] > 0:
                    return i, j
        return None

    def _cliques(self, i: int, j: int) -> list[tuple[int, ...]]:
        """Extensions of ``{i, j}`` to sets whose pairs all still have weight."""
        w = self.weights
        candidates = [
            v
            for v in range(self.n)
            if v not in (i, j) and w[i][v] > 0 and w[j][v] > 0 and self.capacity[v] > 0
        ]
        found: list[tuple[int, ...]] = []

        def extend(start: int, current: list[int]) -> None:
            found.append(tuple(current))
            for pos in range(start, len(candidates)):
                v = candidates[pos]
                if all(w[u][v] > 0 for u in current):
                    current.append(v)
                    extend(pos + 1, current)
                    current.pop()

        extend(0, [])
        found.sort(key=lambda extra: (-len(extra), extra))
        return [tuple(sorted((i, j, *extra))) for extra in found]

    def _apply(self, members: tuple[int, ...], delta: int) -> None:
        for a, b in itertools.combinations(members, 2):
            self.weights[a][b] += delta
            self.weights[b][a] += delta
        for a in members:
            self.capacity[a] += delta

    def _bounded(self, members: tuple[int, ...]) -> bool:
        """Every remaining pair weight fits under both capacities."""
        for a in members:
            if self.capacity[a] < 0:
                return False
            if max(self.weights[a], default=0) > self.capacity[a]:
                return False
        return True

    def run(self) -> bool:
        self.nodes += 1
        edge = self._first_edge()
        if edge is None:
            return all(c >= 0 for c in self.capacity)
        state = self._state()
        if state in self.failed:
            return False
        for members in self._cliques(*edge):
            self._apply(members, -1)
            if self._bounded(members):
                self.chosen.append(members)
                if self.run():
                    return True
                self.chosen.pop()
            self._apply(members, 1)
        self.failed.add(state)
        return False


class PositiveFactorizationOracle:
    """Decides whether a class is a product of positive twists."""

    def __init__(self, max_holes: int = DEFAULT_MAX_HOLES):
        self.max_holes = max_holes

    def solve(self, target: AbClass) -> FeasibilityResult:
        holes = target.universe
        n = len(holes)
        if n > self.max_holes:
            raise OracleLimitError(
                f"{n} holes exceed the oracle limit of {self.max_holes}"
            )
        singles = [target.single(h) for h in holes]
        weights = [[0] * n for _ in range(n)]
        for a, b in itertools.combinations(range(n), 2):
            weights[a][b] = weights[b][a] = target.pair(holes[a], holes[b])

        if not self._plausible(singles, weights):
            log.debug("Rejected class on %d holes without search", n)
            return FeasibilityResult(status=FeasibilityStatus.INFEASIBLE)

        search = _Search(singles, weights)
        if not search.run():
            log.debug("No positive factorization on %d holes after %d nodes", n, search.nodes)
            return FeasibilityResult(
                status=FeasibilityStatus.INFEASIBLE, nodes=search.nodes
            )

        witness = self._witness(holes, search)
        result = FeasibilityResult(
            status=FeasibilityStatus.FEASIBLE, witness=witness, nodes=search.nodes
        )
        replay = ab_class_of_twists(result.witness_twists(), holes, target.outer)
        if not ab_equal(replay, target):
            raise RuntimeError("positive factorization witness does not replay its target")
        return result

    @staticmethod
    def _plausible(singles: list[int], weights: list[list[int]]) -> bool:
        if any(s < 0 for s in singles):
            return False
        n = len(singles)
        for a, b in itertools.combinations(range(n), 2):
            w = weights[a][b]
            if w < 0 or w > min(singles[a], singles[b]):
                return False
        return True

    @staticmethod
    def _witness(holes, search: _Search) -> tuple[WitnessEntry, ...]:
        counts: dict[tuple[int, ...], int] = {}
        for members in search.chosen:
            counts[members] = counts.get(members, 0) + 1
        for a, leftover in enumerate(search.capacity):
            if leftover:
                counts[(a,)] = leftover
        ordered = sorted(counts.items(), key=lambda item: (-len(item[0]), item[0]))
        return tuple(
            WitnessEntry(holes=tuple(holes[i] for i in members), multiplicity=count)
            for members, count in ordered
        )


def positive_feasible(
    target: AbClass, max_holes: int = DEFAULT_MAX_HOLES
) -> FeasibilityResult:
    """Search for a positive factorization of ``target``."""
    return PositiveFactorizationOracle(max_holes=max_holes).solve(target)
