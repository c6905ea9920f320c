"""
Worst-case Tx power control under the EIRP limit.
"""

from typing import Optional, Tuple

from app.channel.link_budget import WORST_CASE_LOSS_DB, max_gain_db, path_loss_db
from app.config.app_config import LinkConfig
from app.models.models import Beamwidth


def power_control(
    w1: Beamwidth, w2: Beamwidth, d_hat: float, cfg: LinkConfig, margin: Optional[float] = None
) -> Tuple[float, bool]:
    """Minimum Tx power meeting snr_min with both ends at the -3 dB edge.

    Returns (ptx, clipped); when ptx would exceed the EIRP limit it is set to
    eirp_max - G1 and clipped is True.
    """
    margin = cfg.power_margin if margin is None else margin
    g1 = max_gain_db(w1, cfg)
    g2 = max_gain_db(w2, cfg)
    ptx = cfg.snr_min + path_loss_db(d_hat, cfg.f0) + cfg.noise_power - (g1 + g2 - WORST_CASE_LOSS_DB) + margin
    if ptx + g1 > cfg.eirp_max:
        return cfg.eirp_max - g1, True
    return ptx, False


def fixed_power_control(w: Beamwidth, d_hat: float, cfg: LinkConfig) -> float:
    """Power control for the fixed baseline, where both ends use the same beam."""
    ptx, _ = power_control(w, w, d_hat, cfg)
    return ptx
