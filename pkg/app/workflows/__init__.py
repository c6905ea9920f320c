"""
Workflows module for the simulation pipeline.
"""

from .simulation_workflow import SimulationWorkflow
from .state import SimulationState, get_initial_state

__all__ = ["SimulationState", "SimulationWorkflow", "get_initial_state"]
