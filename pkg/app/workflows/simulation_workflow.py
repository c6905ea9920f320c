"""
Simulation Workflow.

Implements a LangGraph workflow that builds the trajectory, runs the
simulation (or a sweep) and exports the results.
"""

from typing import Any, Dict, List, Optional

import structlog
from langgraph.graph import END, START, StateGraph
from langgraph.graph.state import CompiledStateGraph

from app.config.app_config import AppConfig
from app.nodes.export_node import ExportNode
from app.nodes.simulation_node import SimulationNode
from app.nodes.trajectory_node import TrajectoryNode
from app.workflows.state import SimulationState, get_initial_state

logger = structlog.get_logger(__name__)


def _route(next_node: str):
    def route(state: SimulationState) -> str:
        return END if state.get("error") else next_node

    return route


class SimulationWorkflow:
    """LangGraph pipeline for one run or one sweep.

    Architecture:
        trajectory -> simulate -> export
        any failure routes to END, so nothing is exported
    """

    def __init__(
        self,
        config: AppConfig,
        trajectory_node: Optional[TrajectoryNode] = None,
        simulation_node: Optional[SimulationNode] = None,
        export_node: Optional[ExportNode] = None,
    ) -> None:
        self.config = config
        self.trajectory_node = trajectory_node or TrajectoryNode()
        self.simulation_node = simulation_node or SimulationNode()
        self.export_node = export_node or ExportNode()
        self.workflow = self._create_workflow()
        logger.info("SimulationWorkflow initialized", mode=config.simulation.mode, output_dir=config.output_dir)

    def _create_workflow(self) -> CompiledStateGraph:
        workflow = StateGraph(SimulationState)

        workflow.add_node("trajectory", self.trajectory_node.process)
        workflow.add_node("simulate", self.simulation_node.process)
        workflow.add_node("export", self.export_node.process)

        workflow.add_edge(START, "trajectory")
        workflow.add_conditional_edges("trajectory", _route("simulate"), ["simulate", END])
        workflow.add_conditional_edges("simulate", _route("export"), ["export", END])
        workflow.add_edge("export", END)

        return workflow.compile()

    def _invoke(self, state: SimulationState) -> Dict[str, Any]:
        try:
            final_state = self.workflow.invoke(state)
        except Exception as e:
            logger.error("Workflow processing failed", error=str(e))
            return {"success": False, "error": str(e), "failure": "internal", "paths": []}

        errors: List[str] = final_state.get("error") or []
        if errors:
            return {
                "success": False,
                "error": "; ".join(errors),
                "failure": final_state.get("failure") or "internal",
                "paths": [],
            }
        response: Dict[str, Any] = {"success": True, "paths": final_state.get("paths", []), "state": final_state}
        if final_state.get("summary") is not None:
            response["summary"] = final_state["summary"]
        if final_state.get("sweep"):
            response["sweep"] = final_state["sweep"]
        if final_state.get("outage") is not None:
            response["outage"] = final_state["outage"]
        return response

    def run(self, estimate_outage: bool = False) -> Dict[str, Any]:
        """Simulate once and export results.csv, summary.txt and cdf.csv."""
        return self._invoke(get_initial_state(self.config, estimate_outage=estimate_outage))

    def sweep(self, axis: str, values: List[float]) -> Dict[str, Any]:
        """One run per value of axis; exports the merged CDF and summary tables."""
        return self._invoke(get_initial_state(self.config, command="sweep", sweep_axis=axis, sweep_values=values))
