"""
Controller types
"""

from typing import Final

HEURISTIC_MODE: Final[str] = "heuristic"
FIXED_MODE: Final[str] = "fixed"
OPTIMIZER_MODE: Final[str] = "optimizer"
