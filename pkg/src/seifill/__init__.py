"""seifill - Stein fillability of contact small Seifert fibered spaces.

Reads a three-leg Legendrian surgery presentation, translates it into a planar
open book and decides fillability with certificates or an obstruction.
"""

from __future__ import annotations

from .models import OpenBook, Presentation, Verdict
from .services.fillability import decide, find_sublinks, obstruction_trace, q_condition
from .services.openbook import translate

__version__ = "0.3.0"

__all__ = [
    "OpenBook",
    "Presentation",
    "Verdict",
    "decide",
    "find_sublinks",
    "obstruction_trace",
    "q_condition",
    "translate",
]
