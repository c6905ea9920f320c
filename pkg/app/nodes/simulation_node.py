"""
Simulation Node for the simulation workflow.
"""

from typing import Any, Dict

import structlog

from app.sim.engine import estimate_outage, run
from app.sim.metrics import metrics
from app.sim.sweep import run_sweep
from app.workflows.state import SimulationState, failure_kind

logger = structlog.get_logger(__name__)


class SimulationNode:
    """Runs the simulation (or a sweep) and summarises it."""

    def process(self, state: SimulationState) -> Dict[str, Any]:
        config = state["config"]
        traj = state.get("trajectory")
        try:
            if state.get("command") == "sweep":
                entries = run_sweep(config, state["sweep_axis"], state.get("sweep_values", []), traj)
                return {"sweep": entries}

            result = run(config, traj)
            update: Dict[str, Any] = {"result": result, "summary": metrics(result)}
            if state.get("estimate_outage"):
                update["outage"] = estimate_outage(config, traj)
            return update
        except Exception as e:
            logger.error("Simulation node failed", error=str(e))
            return {
                "error": [f"Simulation node failed: {e}"],
                "failure": failure_kind(e),
            }
