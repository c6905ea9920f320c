"""
Controllers module: one decision rule per simulation mode.
"""

from .base_controller import BaseController, StepContext
from .controller_factory import create_controller
from .controller_types import FIXED_MODE, HEURISTIC_MODE, OPTIMIZER_MODE
from .fixed_controller import FixedController
from .heuristic_controller import HeuristicController
from .optimizer_controller import OptimizerController
from .registry import ControllerDefinition, ControllerRegistry

__all__ = [
    "BaseController",
    "StepContext",
    "create_controller",
    "FIXED_MODE",
    "HEURISTIC_MODE",
    "OPTIMIZER_MODE",
    "FixedController",
    "HeuristicController",
    "OptimizerController",
    "ControllerDefinition",
    "ControllerRegistry",
]
