"""
Models module for the BPC simulator.
"""

from .models import (
    Beamwidth,
    EulerAngles,
    FilterState,
    GpsObservation,
    ImuSample,
    LosAngles,
    PeerEstimate,
    PointingError,
)
from .response_models import (
    BpcDecision,
    CalibrationReport,
    LinkDecision,
    LosPlaneCovariance,
    OptProblem,
    OptSolution,
    OutageEstimate,
    RunResult,
    RunSummary,
    SweepEntry,
    TimeStepRecord,
)
from .trajectory_models import Trajectory, TrajectorySample, VehiclePair, VehicleTrack

__all__ = [
    "Beamwidth",
    "BpcDecision",
    "CalibrationReport",
    "EulerAngles",
    "FilterState",
    "GpsObservation",
    "ImuSample",
    "LinkDecision",
    "LosAngles",
    "LosPlaneCovariance",
    "OptProblem",
    "OptSolution",
    "OutageEstimate",
    "PeerEstimate",
    "PointingError",
    "RunResult",
    "RunSummary",
    "SweepEntry",
    "TimeStepRecord",
    "Trajectory",
    "TrajectorySample",
    "VehiclePair",
    "VehicleTrack",
]
