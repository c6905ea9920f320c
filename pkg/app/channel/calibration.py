"""
SNR threshold and gain-constant calibration.

Plain-float helpers; LinkConfig calls them from its validator, so nothing
here may import the config module at import time.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import structlog
from scipy.stats import norm

from app.channel.link_budget import path_loss_db
from app.models.response_models import CalibrationReport

if TYPE_CHECKING:
    from app.config.app_config import LinkConfig

logger = structlog.get_logger(__name__)

# returned for ber = 1/2, where the BPSK threshold tends to -inf
SNR_FLOOR_DB = -200.0


def snr_min_from_ber(ber_target: float) -> float:
    """Minimum BPSK SNR in dB from BER = Q(sqrt(2 SNR))."""
    if not 0.0 < ber_target <= 0.5:
        raise ValueError(f"ber_target must lie in (0, 0.5], got {ber_target}")
    q_inv = float(norm.isf(ber_target))
    if q_inv <= 0.0:
        return SNR_FLOOR_DB
    return max(SNR_FLOOR_DB, 10.0 * math.log10(0.5 * q_inv * q_inv))


def boresight_ptx(
    gain_constant: float, beam: float, distance: float, snr: float, f0: float, noise_power: float
) -> float:
    """Tx power giving `snr` with both ends on boresight at a square beam."""
    gain_db = 10.0 * math.log10(gain_constant / (beam * beam))
    return snr - 2.0 * gain_db + path_loss_db(distance, f0) + noise_power


def anchor_gain_constant(
    beam: float, distance: float, snr_db: float, ptx_dbm: float, f0: float, noise_power: float
) -> float:
    """K_g such that ptx_dbm reaches snr_db at `distance` with square beams of `beam` rad."""
    gain_db = 0.5 * (snr_db - ptx_dbm + path_loss_db(distance, f0) + noise_power)
    return 10.0 ** (gain_db / 10.0) * beam * beam


def calibrate(
    link: "LinkConfig",
    second_beam_deg: float = 10.0,
    second_expected_dbm: float = -12.2,
    tolerance_db: float = 0.3,
) -> CalibrationReport:
    """Solve K_g from the link's anchor and check the second anchor."""
    anchor_beam = math.radians(link.anchor_beam_deg)
    second_beam = math.radians(second_beam_deg)
    gain_constant = anchor_gain_constant(
        beam=anchor_beam,
        distance=link.anchor_distance,
        snr_db=link.anchor_snr,
        ptx_dbm=link.anchor_ptx,
        f0=link.f0,
        noise_power=link.noise_power,
    )
    kwargs = dict(distance=link.anchor_distance, snr=link.anchor_snr, f0=link.f0, noise_power=link.noise_power)
    anchor_ptx = boresight_ptx(gain_constant, anchor_beam, **kwargs)
    second_ptx = boresight_ptx(gain_constant, second_beam, **kwargs)
    second_residual = second_ptx - second_expected_dbm
    report = CalibrationReport(
        gain_constant=gain_constant,
        anchor_gain_db=10.0 * math.log10(gain_constant / (anchor_beam * anchor_beam)),
        anchor_ptx_dbm=anchor_ptx,
        anchor_residual_db=anchor_ptx - link.anchor_ptx,
        second_ptx_dbm=second_ptx,
        second_expected_dbm=second_expected_dbm,
        second_residual_db=second_residual,
        proportionality_delta_db=second_ptx - anchor_ptx,
        tolerance_db=tolerance_db,
        passed=abs(second_residual) <= tolerance_db,
    )
    logger.info(
        "Gain constant calibrated",
        gain_constant=gain_constant,
        second_residual_db=second_residual,
        passed=report.passed,
    )
    return report
