"""
Controller registry using Pydantic for type-safe controller definitions.
Single source of truth for the decision modes.
"""

from typing import Any, Optional, Type

from pydantic import BaseModel, ConfigDict, Field

from app.controllers.controller_types import FIXED_MODE, HEURISTIC_MODE, OPTIMIZER_MODE


class ControllerDefinition(BaseModel):
    """Definition for a controller with its metadata."""

    name: str = Field(description="Canonical mode name")
    display_name: str = Field(description="Human-readable name")
    controller_class: Type[Any] = Field(description="Actual Python class")
    uses_truth: bool = Field(default=False, description="True for benchmarks fed with true geometry")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class ControllerRegistry:
    """Registry of all decision modes."""

    @classmethod
    def get_heuristic(cls) -> ControllerDefinition:
        from app.controllers.heuristic_controller import HeuristicController

        return ControllerDefinition(
            name=HEURISTIC_MODE,
            display_name="k-sigma beamwidth and power control",
            controller_class=HeuristicController,
        )

    @classmethod
    def get_fixed(cls) -> ControllerDefinition:
        from app.controllers.fixed_controller import FixedController

        return ControllerDefinition(
            name=FIXED_MODE,
            display_name="Fixed beamwidth baseline",
            controller_class=FixedController,
        )

    @classmethod
    def get_optimizer(cls) -> ControllerDefinition:
        from app.controllers.optimizer_controller import OptimizerController

        return ControllerDefinition(
            name=OPTIMIZER_MODE,
            display_name="Outage-constrained optimizer",
            controller_class=OptimizerController,
            uses_truth=True,
        )

    @classmethod
    def get_all_controllers(cls) -> list[ControllerDefinition]:
        return [cls.get_heuristic(), cls.get_fixed(), cls.get_optimizer()]

    @classmethod
    def find(cls, mode: str) -> Optional[ControllerDefinition]:
        return next((d for d in cls.get_all_controllers() if d.name == mode), None)
