"""
Utils module: results storage and logging setup.
"""

from .logging import configure_logging
from .results_store import ResultsStore, get_results_store

__all__ = [
    "configure_logging",
    "ResultsStore",
    "get_results_store",
]
