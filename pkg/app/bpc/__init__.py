"""
BPC module: heuristic beamwidth selection and worst-case power control.
"""

from .heuristic import (
    OMEGA_MAX,
    OMEGA_MIN,
    bpc_gradients,
    bpc_step,
    initial_decision,
    pointing_statistics,
    relative_covariance,
    select_beamwidth,
)
from .power import fixed_power_control, power_control

__all__ = [
    "OMEGA_MAX",
    "OMEGA_MIN",
    "bpc_gradients",
    "bpc_step",
    "fixed_power_control",
    "initial_decision",
    "pointing_statistics",
    "power_control",
    "relative_covariance",
    "select_beamwidth",
]
