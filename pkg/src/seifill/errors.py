"""Exception types raised by seifill.

Everything that signals bad input derives from ``ValueError`` so callers can
treat schema and invariant failures alike; the CLI maps both to exit code 2.
"""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class PresentationError(ValueError):
    """A leg or presentation violates one of its invariants."""


class UnknownHoleError(ValueError):
    """A hole is not a boundary component of the book at hand."""


class UniverseMismatchError(ValueError):
    """Two classes or certificates live over different hole sets."""


class OracleLimitError(ValueError):
    """The feasibility search was asked to run above its size guard."""


class CertificateError(RuntimeError):
    """A rewrite step broke the balance of multiplicities."""


class ChainEvaluationError(ArithmeticError):
    """A continued fraction hit a zero denominator."""
