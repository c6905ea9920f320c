"""
Probability that a Gaussian pointing error leaves an elliptical beam footprint.

The footprint is mapped to the unit disk; with eigenvalues l1 >= l2 of the
whitened covariance the tail is

    P(outside) = 1/(2 pi) * integral_0^{2 pi} exp(-1 / (2 (l1 cos^2 t + l2 sin^2 t))) dt

evaluated by Gauss-Legendre on a quarter period with node doubling.
"""

import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import erfc, roots_legendre

from app.errors import QuadratureError
from app.models.models import Beamwidth
from app.models.response_models import LosPlaneCovariance

QUADRATURE_TOLERANCE = 1e-10
INITIAL_NODES = 16
MAX_NODES = 4096
RANK_TOLERANCE = 1e-14


@lru_cache(maxsize=16)
def _legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(n)
    return 0.25 * np.pi * (x + 1.0), w


def _quarter_period(l1: float, l2: float, n: int) -> float:
    theta, w = _legendre(n)
    spread = l1 * np.cos(theta) ** 2 + l2 * np.sin(theta) ** 2
    return 0.5 * float(np.sum(w * np.exp(-0.5 / spread)))


def disk_tail(C: np.ndarray, tol: float = QUADRATURE_TOLERANCE) -> float:
    """P(|x| > 1) for x ~ N(0, C) in two dimensions."""
    lam = np.clip(np.linalg.eigvalsh(0.5 * (C + C.T)), 0.0, None)[::-1]
    l1, l2 = float(lam[0]), float(lam[1])
    if l1 <= 0.0:
        return 0.0
    if l2 <= RANK_TOLERANCE * l1:
        return float(erfc(1.0 / np.sqrt(2.0 * l1)))
    n = INITIAL_NODES
    previous = _quarter_period(l1, l2, n)
    while n < MAX_NODES:
        n *= 2
        current = _quarter_period(l1, l2, n)
        if abs(current - previous) < tol:
            return min(1.0, max(0.0, current))
        previous = current
    raise QuadratureError(
        "misalignment quadrature did not converge",
        diagnostics={"l1": l1, "l2": l2, "nodes": n, "last_change": abs(current - previous)},
    )


def ellipse_tail(C: np.ndarray, L: np.ndarray, tol: float = QUADRATURE_TOLERANCE) -> float:
    """P(|L x| > 1) for x ~ N(0, C): mass outside the ellipse {x : |L x| <= 1}."""
    return disk_tail(L @ np.asarray(C, dtype=float) @ L.T, tol)


def footprint_semi_axes(w: Beamwidth, d: float) -> Tuple[float, float]:
    """Semi-axes of the beam cone cut at distance d."""
    return d * math.tan(0.5 * w.az), d * math.tan(0.5 * w.el)


def misalignment_probability(w: Beamwidth, C: LosPlaneCovariance, d: float) -> float:
    """Mass of N(0, C) outside the beam footprint at distance d."""
    if d <= 0.0:
        raise ValueError(f"distance must be positive, got {d}")
    a, b = footprint_semi_axes(w, d)
    return ellipse_tail(C.C, np.diag([1.0 / a, 1.0 / b]))


def p_beam_cover(w: Beamwidth, C: LosPlaneCovariance, d: float) -> float:
    """Mass of N(0, C) inside the beam footprint at distance d."""
    return 1.0 - misalignment_probability(w, C, d)


def p_mis_total(p_tx: float, p_rx: float) -> float:
    """Probability that either end is misaligned."""
    return p_tx + p_rx - p_tx * p_rx


def p_mis_approx(p_tx: float, p_rx: float) -> float:
    return p_tx + p_rx


def per_side_target(p_out_max: float) -> float:
    """Equal per-side budget whose union equals p_out_max."""
    return 1.0 - math.sqrt(1.0 - p_out_max)
