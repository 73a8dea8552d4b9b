"""Abelianized planar mapping class group: multiplicities and positivity."""

from .classes import ab_class, ab_class_of_twists, ab_equal, lantern_decompose
from .oracle import PositiveFactorizationOracle, positive_feasible

__all__ = [
    "PositiveFactorizationOracle",
    "ab_class",
    "ab_class_of_twists",
    "ab_equal",
    "lantern_decompose",
    "positive_feasible",
]
