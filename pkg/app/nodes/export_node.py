"""
Export Node for the simulation workflow.
"""

from typing import Any, Dict, List

import structlog

from app.utils.results_store import get_results_store
from app.workflows.state import SimulationState, failure_kind

logger = structlog.get_logger(__name__)


class ExportNode:
    """Writes the run or sweep outputs to the configured directory."""

    def process(self, state: SimulationState) -> Dict[str, Any]:
        config = state["config"]
        try:
            store = get_results_store(config.output_dir)
            if state.get("command") == "sweep":
                paths = store.write_sweep(state["sweep_axis"], state.get("sweep", []))
            else:
                extra: Dict[str, object] = {"snr_min": config.link.snr_min}
                outage = state.get("outage")
                if outage is not None:
                    extra.update({f"mc_{key}": value for key, value in outage.model_dump().items()})
                paths = store.write_run(state["result"], state["summary"], extra)
            written: List[str] = [str(p) for p in paths]
            logger.info("Outputs written", output_dir=str(store.output_dir), files=len(written))
            return {"paths": written}
        except Exception as e:
            logger.error("Export node failed", error=str(e))
            return {
                "error": [f"Export node failed: {e}"],
                "failure": failure_kind(e),
            }
