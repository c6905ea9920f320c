"""
Trajectory Node for the simulation workflow.
"""

from typing import Any, Dict

import structlog

from app.sim.trajectory import build_trajectory
from app.workflows.state import SimulationState, failure_kind

logger = structlog.get_logger(__name__)


class TrajectoryNode:
    """Loads the configured trajectory CSV or generates the synthetic circuit."""

    def process(self, state: SimulationState) -> Dict[str, Any]:
        config = state["config"]
        if state.get("command") == "sweep" and state.get("sweep_axis") == "f_data":
            # each sweep value samples the route at its own rate
            return {"trajectory": None}
        try:
            traj = build_trajectory(config)
            logger.info("Trajectory ready", samples=len(traj), duration=traj.duration)
            return {"trajectory": traj}
        except Exception as e:
            logger.error("Trajectory node failed", error=str(e))
            return {
                "trajectory": None,
                "error": [f"Trajectory node failed: {e}"],
                "failure": failure_kind(e),
            }
