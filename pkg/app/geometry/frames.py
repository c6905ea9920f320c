"""
Reference frames and line-of-sight angles.

Navigation frame is ENU; vehicle frame is x-forward, y-left, z-up.
"""

from typing import Tuple

import numpy as np

from app.errors import DegenerateGeometryError
from app.geometry.quaternion import ArrayLike, check_unit, euler_to_quat, rotation_matrix_unchecked
from app.models.models import LosAngles

DISTANCE_EPSILON = 1e-3


def relative_position(p1: ArrayLike, p2: ArrayLike, q1: ArrayLike) -> np.ndarray:
    """Position of vehicle 2 expressed in the frame of vehicle 1.

    Rotates p2 - p1 by the conjugate of vehicle 1's orientation, i.e. by R{q1}^T.
    """
    q1 = check_unit(q1)
    dp = np.asarray(p2, dtype=float) - np.asarray(p1, dtype=float)
    R = rotation_matrix_unchecked(q1)
    return np.einsum("...ji,...j->...i", R, dp)


def los_angles(dp: ArrayLike) -> LosAngles:
    """Azimuth atan2(y, x) and elevation asin(z / |dp|) of a displacement."""
    dp = np.asarray(dp, dtype=float)
    r = np.linalg.norm(dp, axis=-1)
    if np.any(r <= DISTANCE_EPSILON):
        raise DegenerateGeometryError(f"displacement norm {np.min(r):.3e} m is below {DISTANCE_EPSILON} m")
    azimuth = np.arctan2(dp[..., 1], dp[..., 0])
    elevation = np.arcsin(np.clip(dp[..., 2] / r, -1.0, 1.0))
    if np.ndim(azimuth) == 0:
        return LosAngles(float(azimuth), float(elevation))
    return LosAngles(azimuth, elevation)


def los_direction(angles: LosAngles) -> np.ndarray:
    """Unit direction with the given azimuth and elevation."""
    az, el = np.asarray(angles.azimuth), np.asarray(angles.elevation)
    return np.stack([np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)], axis=-1)


def los_frame_quaternion(angles: LosAngles) -> np.ndarray:
    """Orientation of the LOS frame inside the vehicle frame.

    The LOS frame has y along the line of sight, x horizontal to its right and
    z completing the right-handed triad; its rotation matrix has those axes as
    columns (vehicle coordinates).
    """
    return euler_to_quat((angles.elevation, 0.0, angles.azimuth - np.pi / 2))


def los_angle_gradients(dp: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of azimuth and elevation with respect to the displacement."""
    x, y, z = (float(c) for c in dp)
    rho2 = x * x + y * y
    r2 = rho2 + z * z
    if r2 <= DISTANCE_EPSILON**2:
        raise DegenerateGeometryError(f"displacement norm {np.sqrt(r2):.3e} m is below {DISTANCE_EPSILON} m")
    rho = np.sqrt(rho2)
    if rho <= DISTANCE_EPSILON:
        raise DegenerateGeometryError("peer lies on the vertical axis; azimuth is undefined")
    b_alpha = np.array([-y / rho2, x / rho2, 0.0])
    b_beta = np.array([-z * x / (r2 * rho), -z * y / (r2 * rho), rho / r2])
    return b_alpha, b_beta
