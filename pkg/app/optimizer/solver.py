"""
Outage-constrained beamwidth and power optimization.

Each end gets half of the outage budget (inverted through the union rule).
The footprint aligned with the principal axes of that end's LOS-plane
covariance fixes the beam aspect through the smallest axis-aligned ellipse
containing it; a common scale on that physical az/el footprint is then
bisected until its tail meets the per-side target.
"""

import math
from typing import Tuple

import numpy as np
import structlog

from app.bpc.power import power_control
from app.config.app_config import LinkConfig
from app.models.models import Beamwidth
from app.models.response_models import LosPlaneCovariance, OptProblem, OptSolution
from app.optimizer.misalignment import ellipse_tail, misalignment_probability, p_mis_total, per_side_target
from app.optimizer.projection import los_plane_side

logger = structlog.get_logger(__name__)

MAX_ITERATIONS = 60
TARGET_TOLERANCE = 1e-9
REGULARIZATION = 1e-12


def required_ptx_worstcase(w1: Beamwidth, w2: Beamwidth, d: float, cfg: LinkConfig) -> float:
    """Worst-case Tx power for the given beams; same rule as power_control at zero margin."""
    ptx, _ = power_control(w1, w2, d, cfg, margin=0.0)
    return ptx


def _regularized(C: np.ndarray) -> np.ndarray:
    C = 0.5 * (C + C.T)
    return C + REGULARIZATION * max(float(np.trace(C)), 1e-300) * np.eye(2)


def fit_principal_scale(C: np.ndarray, target: float) -> Tuple[float, float]:
    """Scale s of the ellipse with semi-axes s*sqrt(lambda_i) whose tail equals target.

    Whitened, that ellipse is the disk of radius s, so the tail is exp(-s^2 / 2).
    Returns (s, tail evaluated by quadrature).
    """
    lam, V = np.linalg.eigh(C)
    s = math.sqrt(-2.0 * math.log(target))
    whiten = np.diag(1.0 / np.sqrt(lam)) @ V.T
    return s, ellipse_tail(C, whiten / s)


def circumscribing_semi_axes(C: np.ndarray, s: float) -> Tuple[float, float]:
    """Half-extents along x and z of {x : x^T C^-1 x <= s^2}."""
    P = np.linalg.inv(C)
    p11, p22, p12 = P[0, 0], P[1, 1], abs(P[0, 1])
    hx = s / math.sqrt(p11 - p12 * math.sqrt(p11 / p22))
    hz = s / math.sqrt(p22 - p12 * math.sqrt(p22 / p11))
    return hx, hz


def _clamped_beam(hx: float, hz: float, d: float, omega_min: float, omega_max: float) -> Tuple[Beamwidth, bool]:
    az = 2.0 * math.atan(hx / d)
    el = 2.0 * math.atan(hz / d)
    truncated = az > omega_max or el > omega_max
    beam = Beamwidth(min(max(az, omega_min), omega_max), min(max(el, omega_min), omega_max))
    return beam, truncated


def circumscribing_beam(
    C: np.ndarray, s: float, d: float, omega_min: float, omega_max: float
) -> Tuple[Beamwidth, bool]:
    """Smallest axis-aligned footprint containing {x : x^T C^-1 x <= s^2}, as beamwidths.

    Returns the clamped beam and whether the clamp at omega_max left the
    ellipse uncovered.
    """
    hx, hz = circumscribing_semi_axes(C, s)
    return _clamped_beam(hx, hz, d, omega_min, omega_max)


def fit_footprint_scale(C: np.ndarray, hx: float, hz: float, target: float) -> Tuple[float, float, int]:
    """Common factor c on the footprint semi-axes (c*hx, c*hz) whose tail equals target.

    Returns (c, achieved tail, iterations); c sits on the covered side
    (tail <= target) of the bracket.
    """

    def tail(c: float) -> float:
        return ellipse_tail(C, np.diag([1.0 / (c * hx), 1.0 / (c * hz)]))

    lo, hi = 0.0, 1.0
    tail_hi = tail(hi)
    while tail_hi > target:
        lo, hi = hi, 2.0 * hi
        tail_hi = tail(hi)
    iterations = 0
    while iterations < MAX_ITERATIONS and abs(tail_hi - target) > TARGET_TOLERANCE:
        iterations += 1
        mid = 0.5 * (lo + hi)
        value = tail(mid)
        if value > target:
            lo = mid
        else:
            hi, tail_hi = mid, value
    return hi, tail_hi, iterations


def _solve_side(C: LosPlaneCovariance, d: float, target: float, cfg: LinkConfig) -> Tuple[Beamwidth, float, int, bool]:
    if float(np.trace(C.C)) <= 0.0:
        return Beamwidth(cfg.omega_min, cfg.omega_min), 0.0, 0, True
    C_reg = _regularized(C.C)
    s, _ = fit_principal_scale(C_reg, target)
    hx, hz = circumscribing_semi_axes(C_reg, s)
    c, _, iterations = fit_footprint_scale(C_reg, hx, hz, target)
    beam, truncated = _clamped_beam(c * hx, c * hz, d, cfg.omega_min, cfg.omega_max)
    achieved = misalignment_probability(beam, C, d)
    return beam, achieved, iterations, not truncated


def optimize(prob: OptProblem) -> OptSolution:
    """Minimum-power beams meeting the misalignment budget; infeasibility is reported, not raised."""
    cfg = prob.link
    target = per_side_target(prob.p_out_max)
    c_tx, d = los_plane_side(prob.p1, prob.q1, prob.p2, prob.C_p1, prob.C_p2, prob.C_gamma1)
    c_rx, _ = los_plane_side(prob.p2, prob.q2, prob.p1, prob.C_p2, prob.C_p1, prob.C_gamma2)
    w1, p_tx, it_tx, covered_tx = _solve_side(c_tx, d, target, cfg)
    w2, p_rx, it_rx, covered_rx = _solve_side(c_rx, d, target, cfg)
    ptx, clipped = power_control(w1, w2, d, cfg, margin=0.0)
    if clipped:
        logger.warning("Optimizer Tx power clipped to EIRP limit", d=d, ptx=ptx)
    return OptSolution(
        w1=w1,
        w2=w2,
        ptx=ptx,
        p_mis=p_mis_total(p_tx, p_rx),
        p_mis_tx=p_tx,
        p_mis_rx=p_rx,
        side_target=target,
        iterations=it_tx + it_rx,
        feasible=covered_tx and covered_rx and not clipped,
    )
