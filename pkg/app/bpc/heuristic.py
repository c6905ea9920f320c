"""
Sensor-assisted beamwidth selection.

Position and orientation covariances exchanged over the control link are
linearized into pointing-angle variances; each beam covers +/- k sigma.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from app.bpc.power import power_control
from app.channel.link_budget import max_gain_db
from app.config.app_config import LinkConfig
from app.fusion.covariance import require_psd
from app.geometry.frames import los_angle_gradients, los_angles
from app.geometry.quaternion import check_unit, quat_conjugate, rotation_jacobian, rotation_matrix
from app.models.models import Beamwidth, LosAngles, PeerEstimate
from app.models.response_models import BpcDecision

OMEGA_MIN = math.radians(1.8)
OMEGA_MAX = math.radians(120.0)
CONJUGATE_SIGNS = np.diag([1.0, -1.0, -1.0, -1.0])


def bpc_gradients(
    own: PeerEstimate, peer: PeerEstimate
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Linearization of the peer's LOS angles in the own vehicle frame.

    Returns B_q1 (3x4, w.r.t. the vehicle-to-nav quaternion), B_dp (3x3) and
    the azimuth/elevation gradients b_alpha, b_beta (3,).
    """
    q = check_unit(own.q_hat)
    dp_nav = peer.p_hat - own.p_hat
    B_dp = rotation_matrix(q).T
    dp_vehicle = B_dp @ dp_nav
    b_alpha, b_beta = los_angle_gradients(dp_vehicle)
    B_q1 = rotation_jacobian(quat_conjugate(q), dp_nav)
    return B_q1, B_dp, b_alpha, b_beta


def relative_covariance(own: PeerEstimate, peer: PeerEstimate, B_q1: np.ndarray, B_dp: np.ndarray) -> np.ndarray:
    """Covariance of the peer displacement in the own vehicle frame."""
    C_q = require_psd(own.C_q_hat, "C_q_hat")
    C_p = require_psd(own.C_p_hat, "own C_p_hat") + require_psd(peer.C_p_hat, "peer C_p_hat")
    C_conj = CONJUGATE_SIGNS @ C_q @ CONJUGATE_SIGNS
    C = B_q1 @ C_conj @ B_q1.T + B_dp @ C_p @ B_dp.T
    return 0.5 * (C + C.T)


def pointing_statistics(own: PeerEstimate, peer: PeerEstimate) -> Tuple[LosAngles, float, float]:
    """Estimated LOS angles and their standard deviations, rad."""
    B_q1, B_dp, b_alpha, b_beta = bpc_gradients(own, peer)
    C = relative_covariance(own, peer, B_q1, B_dp)
    pointing = los_angles(B_dp @ (peer.p_hat - own.p_hat))
    var_alpha = max(0.0, float(b_alpha @ C @ b_alpha))
    var_beta = max(0.0, float(b_beta @ C @ b_beta))
    return pointing, math.sqrt(var_alpha), math.sqrt(var_beta)


def _snap_up(value: float, codebook: Sequence[float]) -> float:
    above = [c for c in sorted(codebook) if c >= value]
    return above[0] if above else max(codebook)


def select_beamwidth(
    sigma_alpha: float,
    sigma_beta: float,
    k: float,
    codebook: Optional[Sequence[float]] = None,
    omega_min: float = OMEGA_MIN,
    omega_max: float = OMEGA_MAX,
) -> Beamwidth:
    """Full beamwidths 2 k sigma per axis, clamped, then snapped up to a codebook."""
    if k <= 0.0:
        raise ValueError(f"confidence factor k must be positive, got {k}")
    az = min(max(2.0 * k * sigma_alpha, omega_min), omega_max)
    el = min(max(2.0 * k * sigma_beta, omega_min), omega_max)
    if codebook is not None and len(codebook):
        az, el = _snap_up(az, codebook), _snap_up(el, codebook)
    return Beamwidth(az, el)


def bpc_step(
    own: PeerEstimate,
    peer: PeerEstimate,
    cfg: LinkConfig,
    k: float,
    codebook: Optional[Sequence[float]] = None,
) -> BpcDecision:
    """Beamwidths for both ends from the exchanged estimates, then Tx power."""
    kwargs = dict(codebook=codebook, omega_min=cfg.omega_min, omega_max=cfg.omega_max)
    pointing, sigma_alpha, sigma_beta = pointing_statistics(own, peer)
    beam = select_beamwidth(sigma_alpha, sigma_beta, k, **kwargs)
    _, peer_sigma_alpha, peer_sigma_beta = pointing_statistics(peer, own)
    peer_beam = select_beamwidth(peer_sigma_alpha, peer_sigma_beta, k, **kwargs)
    d_hat = float(np.linalg.norm(peer.p_hat - own.p_hat))
    ptx, clipped = power_control(beam, peer_beam, d_hat, cfg)
    return BpcDecision(
        beamwidth=beam,
        peer_beamwidth=peer_beam,
        ptx=ptx,
        pointing=pointing,
        sigma_alpha=sigma_alpha,
        sigma_beta=sigma_beta,
        d_hat=d_hat,
        eirp_clipped=clipped,
    )


def initial_decision(cfg: LinkConfig, pointing: LosAngles = LosAngles(0.0, 0.0)) -> BpcDecision:
    """Widest beams at the EIRP-limited power, used before the first peer estimate arrives."""
    beam = Beamwidth(cfg.omega_max, cfg.omega_max)
    return BpcDecision(
        beamwidth=beam,
        peer_beamwidth=beam,
        ptx=cfg.eirp_max - max_gain_db(beam, cfg),
        pointing=pointing,
        sigma_alpha=0.0,
        sigma_beta=0.0,
        d_hat=None,
        eirp_clipped=False,
    )
