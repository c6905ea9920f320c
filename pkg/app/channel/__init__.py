"""
Channel module: beam patterns, path loss, SNR and calibration.
"""

from .calibration import SNR_FLOOR_DB, anchor_gain_constant, boresight_ptx, calibrate, snr_min_from_ber
from .link_budget import (
    SPEED_OF_LIGHT,
    WORST_CASE_LOSS_DB,
    eirp_dbm,
    max_gain,
    max_gain_db,
    path_loss_db,
    pattern_gain,
    snr_db,
)

__all__ = [
    "SNR_FLOOR_DB",
    "SPEED_OF_LIGHT",
    "WORST_CASE_LOSS_DB",
    "anchor_gain_constant",
    "boresight_ptx",
    "calibrate",
    "eirp_dbm",
    "max_gain",
    "max_gain_db",
    "path_loss_db",
    "pattern_gain",
    "snr_db",
    "snr_min_from_ber",
]
