"""Protocol interfaces for the pluggable parts of the decision procedure.

The fillability service and the survey only talk to these interfaces, so tests
can hand in fakes and alternative searches can be swapped in.
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

from ..models import AbClass, FeasibilityResult, OpenBook, RewriteResult


@runtime_checkable
class FeasibilityOracle(Protocol):
    """Decides positivity of an abelianized class.

    Implementations raise ``OracleLimitError`` when the class lives on more
    holes than ``max_holes``.
    """

    max_holes: int

    def solve(self, target: AbClass) -> FeasibilityResult:
        """Search for a positive factorization of ``target``.

        Args:
            target: The class to factor.

        Returns:
            The search outcome; a feasible result carries a witness whose
            class equals ``target``.
        """
        ...


@runtime_checkable
class CertificateBuilder(Protocol):
    """Builds a positive factorization of a sublink book."""

    def __call__(self, book: OpenBook) -> RewriteResult:
        """Rewrite ``book`` into positive twists with the same class."""
        ...
