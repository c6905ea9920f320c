"""
State definition for the simulation workflow.
"""

from typing import List, Optional

from typing_extensions import TypedDict

from app.config.app_config import AppConfig
from app.errors import BpcError, NumericalFailureError
from app.models.response_models import OutageEstimate, RunResult, RunSummary, SweepEntry
from app.models.trajectory_models import Trajectory


class SimulationState(TypedDict):
    """State shared across all nodes in the simulation workflow."""

    config: AppConfig
    command: str
    sweep_axis: Optional[str]
    sweep_values: List[float]
    estimate_outage: bool
    trajectory: Optional[Trajectory]
    result: Optional[RunResult]
    summary: Optional[RunSummary]
    outage: Optional[OutageEstimate]
    sweep: List[SweepEntry]
    paths: List[str]
    error: List[str]
    failure: Optional[str]


def get_initial_state(
    config: AppConfig,
    command: str = "run",
    sweep_axis: Optional[str] = None,
    sweep_values: Optional[List[float]] = None,
    estimate_outage: bool = False,
) -> SimulationState:
    """Get the initial simulation state."""
    return SimulationState(
        config=config,
        command=command,
        sweep_axis=sweep_axis,
        sweep_values=list(sweep_values or []),
        estimate_outage=estimate_outage,
        trajectory=None,
        result=None,
        summary=None,
        outage=None,
        sweep=[],
        paths=[],
        error=[],
        failure=None,
    )


def failure_kind(error: Exception) -> str:
    """Failure class used for routing and exit codes."""
    if isinstance(error, NumericalFailureError):
        return "numerical"
    if isinstance(error, BpcError):
        return "input"
    return "internal"

