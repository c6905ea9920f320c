"""
Projection of position and orientation errors onto the plane transverse to
the line of sight at the receiver.

The LOS frame has its y axis along the line of sight; x and z span the
transverse plane, so index 0 and 2 are kept.
"""

from typing import Tuple

import numpy as np

from app.fusion.covariance import aligned_euler_jacobian, require_psd
from app.geometry.frames import los_angles, los_frame_quaternion
from app.geometry.quaternion import check_unit, quat_conjugate, rotation_jacobian, rotation_matrix
from app.models.response_models import LosPlaneCovariance

TRANSVERSE = [0, 2]
CONJUGATE_SIGNS = np.diag([1.0, -1.0, -1.0, -1.0])


def nav_to_los_rotation(q_self: np.ndarray, los_rotation: np.ndarray) -> np.ndarray:
    """Q = R{q_los}^T R{q_self}^T, mapping nav-frame vectors to LOS coordinates."""
    return rotation_matrix(los_rotation).T @ rotation_matrix(q_self).T


def rotate_to_los(C_p: np.ndarray, q_self: np.ndarray, los_rotation: np.ndarray) -> np.ndarray:
    """Full 3x3 nav-frame position covariance expressed in LOS coordinates."""
    C_p = require_psd(C_p, "C_p")
    Q = nav_to_los_rotation(q_self, los_rotation)
    return Q @ C_p @ Q.T


def project_position_cov(C_p: np.ndarray, q_self: np.ndarray, los_rotation: np.ndarray) -> LosPlaneCovariance:
    C = rotate_to_los(C_p, q_self, los_rotation)[np.ix_(TRANSVERSE, TRANSVERSE)]
    return LosPlaneCovariance(C=0.5 * (C + C.T))


def los_geometry(q_self: np.ndarray, dp_nav: np.ndarray) -> Tuple[np.ndarray, float]:
    """LOS-frame quaternion toward the peer and the distance."""
    q_self = check_unit(q_self)
    dp_nav = np.asarray(dp_nav, dtype=float)
    dp_vehicle = rotation_matrix(q_self).T @ dp_nav
    return los_frame_quaternion(los_angles(dp_vehicle)), float(np.linalg.norm(dp_nav))


def orientation_cov_to_los(C_gamma: np.ndarray, q_self: np.ndarray, dp_nav: np.ndarray) -> np.ndarray:
    """Covariance of the LOS-frame pointing deviation caused by Euler-angle errors, rad^2."""
    C_gamma = require_psd(C_gamma, "C_gamma")
    q_los, d = los_geometry(q_self, dp_nav)
    R_bar = rotation_matrix(q_los).T
    B = rotation_jacobian(quat_conjugate(q_self), dp_nav)
    J = (R_bar @ B @ CONJUGATE_SIGNS @ aligned_euler_jacobian(q_self))[TRANSVERSE] / d
    C = J @ C_gamma @ J.T
    return 0.5 * (C + C.T)


def combined_los_cov(
    c1: LosPlaneCovariance, c2: LosPlaneCovariance, c_orient: np.ndarray, d: float
) -> LosPlaneCovariance:
    """Position errors of both ends plus the orientation error scaled to distance d."""
    return LosPlaneCovariance(C=c1.C + c2.C + d * d * np.asarray(c_orient, dtype=float))


def los_plane_side(
    p_self: np.ndarray,
    q_self: np.ndarray,
    p_peer: np.ndarray,
    C_p_self: np.ndarray,
    C_p_peer: np.ndarray,
    C_gamma_self: np.ndarray,
) -> Tuple[LosPlaneCovariance, float]:
    """LOS-plane error covariance seen by one end's beam, and the distance."""
    dp_nav = np.asarray(p_peer, dtype=float) - np.asarray(p_self, dtype=float)
    q_los, d = los_geometry(q_self, dp_nav)
    c1 = project_position_cov(C_p_self, q_self, q_los)
    c2 = project_position_cov(C_p_peer, q_self, q_los)
    c_orient = orientation_cov_to_los(C_gamma_self, q_self, dp_nav)
    return combined_los_cov(c1, c2, c_orient, d), d
