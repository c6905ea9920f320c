"""
Beam-based LOS link budget.

Gains are linear inside pattern_gain/max_gain and in dB everywhere else.
Every function broadcasts over numpy arrays.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Union

import numpy as np
import structlog

from app.models.models import Beamwidth, PointingError

if TYPE_CHECKING:
    from app.config.app_config import LinkConfig

logger = structlog.get_logger(__name__)

SPEED_OF_LIGHT = 299_792_458.0
NEAR_FIELD_DISTANCE = 1.0
# Tx and Rx both at the -3 dB edge on both axes: (1/4) * (1/4)
WORST_CASE_LOSS_DB = 10.0 * math.log10(16.0)

Scalar = Union[float, np.ndarray]


def pattern_gain(e: PointingError, w: Beamwidth) -> Scalar:
    """Gaussian beam pattern normalised to 1 on boresight, 1/2 at half beamwidth."""
    x = 2.0 * np.asarray(e.d_az) / np.asarray(w.az)
    y = 2.0 * np.asarray(e.d_el) / np.asarray(w.el)
    g = np.exp(-math.log(2.0) * (x * x + y * y))
    return float(g) if np.ndim(g) == 0 else g


def max_gain(w: Beamwidth, cfg: "LinkConfig") -> Scalar:
    """Boresight gain K_g / (az * el), beamwidths in radians."""
    g = cfg.gain_constant / (np.asarray(w.az) * np.asarray(w.el))
    return float(g) if np.ndim(g) == 0 else g


def max_gain_db(w: Beamwidth, cfg: "LinkConfig") -> Scalar:
    g = 10.0 * np.log10(max_gain(w, cfg))
    return float(g) if np.ndim(g) == 0 else g


def path_loss_db(d: Scalar, f0: float) -> Scalar:
    """Free-space path loss 20 log10(4 pi d f0 / c); d is clamped to 1 m."""
    d = np.asarray(d, dtype=float)
    if np.any(d < NEAR_FIELD_DISTANCE):
        logger.warning("Distance below near-field limit, clamped", min_distance=float(np.min(d)))
        d = np.maximum(d, NEAR_FIELD_DISTANCE)
    loss = 20.0 * np.log10(4.0 * math.pi * d * f0 / SPEED_OF_LIGHT)
    return float(loss) if loss.ndim == 0 else loss


def snr_db(ptx: Scalar, g1: Scalar, g2: Scalar, d: Scalar, cfg: "LinkConfig") -> Scalar:
    """Receiver SNR for Tx power ptx (dBm) and linear end gains g1, g2."""
    snr = (
        np.asarray(ptx, dtype=float)
        + 10.0 * np.log10(g1)
        + 10.0 * np.log10(g2)
        - path_loss_db(d, cfg.f0)
        - cfg.noise_power
    )
    return float(snr) if np.ndim(snr) == 0 else snr


def eirp_dbm(ptx: Scalar, w: Beamwidth, cfg: "LinkConfig") -> Scalar:
    return ptx + max_gain_db(w, cfg)
