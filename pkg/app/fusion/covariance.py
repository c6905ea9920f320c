"""
Covariance utilities: PSD checks and the Euler <-> quaternion linearized
covariance mappings.
"""

import numpy as np

from app.errors import InvalidOrientationError, NonPsdCovarianceError
from app.geometry.quaternion import (
    check_unit,
    euler_jacobian,
    euler_to_quat,
    is_gimbal_locked,
    quat_to_euler,
)

PSD_TOLERANCE = 1e-9
SYMMETRY_TOLERANCE = 1e-10


def require_psd(C: np.ndarray, name: str = "covariance") -> np.ndarray:
    """Return the symmetrised C, raising NonPsdCovarianceError if it is not PSD."""
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise NonPsdCovarianceError(f"{name} must be square, got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise NonPsdCovarianceError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(C))))
    if np.max(np.abs(C - C.T)) > SYMMETRY_TOLERANCE * scale:
        raise NonPsdCovarianceError(f"{name} is not symmetric")
    C = 0.5 * (C + C.T)
    min_eig = float(np.min(np.linalg.eigvalsh(C)))
    if min_eig < -PSD_TOLERANCE * scale:
        raise NonPsdCovarianceError(f"{name} is not positive semidefinite (min eigenvalue {min_eig:.3e})")
    return C


def aligned_euler_jacobian(q: np.ndarray) -> np.ndarray:
    """dm/dgamma at the Euler angles of q, signed to match q."""
    q = check_unit(q)
    e = quat_to_euler(q)
    if is_gimbal_locked(e.pitch):
        raise InvalidOrientationError("Euler covariance mapping is undefined at gimbal lock")
    J = euler_jacobian(e)
    # m(gamma) may come back as -q; the Jacobian must follow q's sign
    if np.dot(euler_to_quat(e), q) < 0.0:
        J = -J
    return J


def quat_cov_from_euler_cov(q: np.ndarray, C_gamma: np.ndarray) -> np.ndarray:
    """C_q = J C_gamma J^T with J = dm/dgamma at the Euler angles of q."""
    C_gamma = require_psd(C_gamma, "C_gamma")
    J = aligned_euler_jacobian(q)
    C_q = J @ C_gamma @ J.T
    return 0.5 * (C_q + C_q.T)


def euler_cov_from_quat_cov(q: np.ndarray, C_q: np.ndarray) -> np.ndarray:
    """Euler covariance recovered through the pseudo-inverse of dm/dgamma."""
    C_q = require_psd(C_q, "C_q")
    J_pinv = np.linalg.pinv(aligned_euler_jacobian(q))
    C_gamma = J_pinv @ C_q @ J_pinv.T
    return 0.5 * (C_gamma + C_gamma.T)
