"""
Nodes module for the simulation workflow.
"""

from .export_node import ExportNode
from .simulation_node import SimulationNode
from .trajectory_node import TrajectoryNode

__all__ = [
    "ExportNode",
    "SimulationNode",
    "TrajectoryNode",
]
