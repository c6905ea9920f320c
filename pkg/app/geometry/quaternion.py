"""
Quaternion algebra.

Quaternions are scalar-first [q0, q1, q2, q3] Hamilton quaternions. A
quaternion q describes the nav-to-vehicle orientation: R{q} maps vehicle-frame
vectors into the navigation frame. Every function accepts leading batch
dimensions, i.e. arrays of shape (..., 4) and (..., 3).
"""

from typing import Union

import numpy as np
import structlog

from app.errors import InvalidOrientationError
from app.models.models import EulerAngles

logger = structlog.get_logger(__name__)

UNIT_TOLERANCE = 1e-6
GIMBAL_TOLERANCE = 1e-6

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

ArrayLike = Union[np.ndarray, list, tuple]


def check_unit(q: ArrayLike) -> np.ndarray:
    """Return q as an array, raising if any quaternion is not unit norm."""
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != 4:
        raise InvalidOrientationError(f"quaternion must have 4 components, got shape {q.shape}")
    norm = np.linalg.norm(q, axis=-1)
    if not np.all(np.abs(norm - 1.0) <= UNIT_TOLERANCE):
        raise InvalidOrientationError(
            f"quaternion is not unit norm (max deviation {np.max(np.abs(norm - 1.0)):.3e})"
        )
    return q


def quat_conjugate(q: ArrayLike) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def quat_normalize(q: ArrayLike) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_left(q: ArrayLike) -> np.ndarray:
    """Matrix form of left multiplication: quat_left(a) @ b == a ⊙ b."""
    q0, q1, q2, q3 = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack(
        [
            np.stack([q0, -q1, -q2, -q3], axis=-1),
            np.stack([q1, q0, -q3, q2], axis=-1),
            np.stack([q2, q3, q0, -q1], axis=-1),
            np.stack([q3, -q2, q1, q0], axis=-1),
        ],
        axis=-2,
    )


def quat_right(q: ArrayLike) -> np.ndarray:
    """Matrix form of right multiplication: quat_right(b) @ a == a ⊙ b."""
    q0, q1, q2, q3 = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack(
        [
            np.stack([q0, -q1, -q2, -q3], axis=-1),
            np.stack([q1, q0, q3, -q2], axis=-1),
            np.stack([q2, -q3, q0, q1], axis=-1),
            np.stack([q3, q2, -q1, q0], axis=-1),
        ],
        axis=-2,
    )


def quat_multiply(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Hamilton product a ⊙ b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def quat_exp(v: ArrayLike) -> np.ndarray:
    """Exponential of the pure quaternion [0, v]: [cos|v|, v/|v| sin|v|]."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    # np.sinc(x) = sin(pi x)/(pi x) keeps the zero-rotation limit exact
    return np.concatenate([np.cos(n), v * np.sinc(n / np.pi)], axis=-1)


def quat_exp_jacobian(v: ArrayLike) -> np.ndarray:
    """4x3 derivative of quat_exp with respect to v."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n < 1e-8:
        s = 1.0 - n * n / 6.0
        ds_over_n = -1.0 / 3.0 + n * n / 30.0
    else:
        s = np.sin(n) / n
        ds_over_n = (n * np.cos(n) - np.sin(n)) / n**3
    top = -s * v[np.newaxis, :]
    bottom = s * np.eye(3) + ds_over_n * np.outer(v, v)
    return np.vstack([top, bottom])


def rotation_matrix_unchecked(q: np.ndarray) -> np.ndarray:
    # homogeneous quadratic form; equals the usual form on the unit sphere
    q0, q1, q2, q3 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            np.stack(
                [q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3, 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2)],
                axis=-1,
            ),
            np.stack(
                [2 * (q1 * q2 + q0 * q3), q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3, 2 * (q2 * q3 - q0 * q1)],
                axis=-1,
            ),
            np.stack(
                [2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3],
                axis=-1,
            ),
        ],
        axis=-2,
    )


def rotation_matrix(q: ArrayLike) -> np.ndarray:
    """R{q}, mapping vehicle-frame vectors into the navigation frame."""
    return rotation_matrix_unchecked(check_unit(q))


def quat_rotate(q: ArrayLike, u: ArrayLike) -> np.ndarray:
    """Vector part of q ⊙ [0, u] ⊙ q*."""
    q = check_unit(q)
    u = np.asarray(u, dtype=float)
    pure = np.concatenate([np.zeros(u.shape[:-1] + (1,)), u], axis=-1)
    return quat_multiply(quat_multiply(q, pure), quat_conjugate(q))[..., 1:]


def rotation_jacobian(q: ArrayLike, u: ArrayLike) -> np.ndarray:
    """3x4 derivative of R{q} u with respect to q (q not required to be unit)."""
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    q0, qv = q[0], q[1:]
    cross_u = np.array([[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]])
    d_q0 = 2.0 * (q0 * u + np.cross(qv, u))
    d_qv = 2.0 * (-np.outer(u, qv) + np.dot(qv, u) * np.eye(3) + np.outer(qv, u) - q0 * cross_u)
    return np.column_stack([d_q0, d_qv])


def euler_to_quat(e: Union[EulerAngles, ArrayLike]) -> np.ndarray:
    """Quaternion of the intrinsic ZYX sequence yaw, pitch, roll."""
    roll, pitch, yaw = np.moveaxis(np.asarray(e, dtype=float), -1, 0)
    cr, sr = np.cos(roll / 2), np.sin(roll / 2)
    cp, sp = np.cos(pitch / 2), np.sin(pitch / 2)
    cy, sy = np.cos(yaw / 2), np.sin(yaw / 2)
    return np.stack(
        [
            cr * cp * cy + sr * sp * sy,
            sr * cp * cy - cr * sp * sy,
            cr * sp * cy + sr * cp * sy,
            cr * cp * sy - sr * sp * cy,
        ],
        axis=-1,
    )


def euler_jacobian(e: Union[EulerAngles, ArrayLike]) -> np.ndarray:
    """4x3 derivative of euler_to_quat with respect to (roll, pitch, yaw)."""
    roll, pitch, yaw = (float(x) for x in e)
    cr, sr = np.cos(roll / 2), np.sin(roll / 2)
    cp, sp = np.cos(pitch / 2), np.sin(pitch / 2)
    cy, sy = np.cos(yaw / 2), np.sin(yaw / 2)
    return 0.5 * np.array(
        [
            [-sr * cp * cy + cr * sp * sy, -cr * sp * cy + sr * cp * sy, -cr * cp * sy + sr * sp * cy],
            [cr * cp * cy + sr * sp * sy, -sr * sp * cy - cr * cp * sy, -sr * cp * sy - cr * sp * cy],
            [-sr * sp * cy + cr * cp * sy, cr * cp * cy - sr * sp * sy, -cr * sp * sy + sr * cp * cy],
            [-sr * cp * sy - cr * sp * cy, -cr * sp * sy - sr * cp * cy, cr * cp * cy + sr * sp * sy],
        ]
    )


def is_gimbal_locked(pitch: float) -> bool:
    return abs(abs(pitch) - np.pi / 2) < GIMBAL_TOLERANCE


def wrap_angle(a: ArrayLike) -> np.ndarray:
    """Wrap angles into (-pi, pi]."""
    a = np.asarray(a, dtype=float)
    wrapped = np.mod(a + np.pi, 2 * np.pi) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


def quat_to_euler(q: ArrayLike) -> EulerAngles:
    """Intrinsic ZYX angles of a unit quaternion.

    At gimbal lock the yaw is set to 0 and the whole rotation about the
    vertical is reported as roll.
    """
    q0, q1, q2, q3 = check_unit(q)
    pitch = float(np.arcsin(np.clip(2.0 * (q0 * q2 - q1 * q3), -1.0, 1.0)))
    if is_gimbal_locked(pitch):
        logger.warning("Gimbal lock in quaternion to Euler conversion", pitch=pitch)
        roll = float(wrap_angle(2.0 * np.arctan2(q1, q0)))
        return EulerAngles(roll=roll, pitch=float(np.sign(pitch) * np.pi / 2), yaw=0.0)
    roll = float(np.arctan2(2.0 * (q0 * q1 + q2 * q3), 1.0 - 2.0 * (q1 * q1 + q2 * q2)))
    yaw = float(np.arctan2(2.0 * (q0 * q3 + q1 * q2), 1.0 - 2.0 * (q2 * q2 + q3 * q3)))
    return EulerAngles(roll=roll, pitch=pitch, yaw=yaw)


def quat_slerp(q0: ArrayLike, q1: ArrayLike, fraction: ArrayLike) -> np.ndarray:
    """Spherical-linear interpolation along the shortest arc."""
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    f = np.asarray(fraction, dtype=float)[..., np.newaxis]
    dot = np.sum(q0 * q1, axis=-1, keepdims=True)
    q1 = np.where(dot < 0.0, -q1, q1)
    dot = np.abs(dot)
    theta = np.arccos(np.clip(dot, -1.0, 1.0))
    sin_theta = np.sin(theta)
    near = sin_theta < 1e-9
    safe = np.where(near, 1.0, sin_theta)
    w0 = np.where(near, 1.0 - f, np.sin((1.0 - f) * theta) / safe)
    w1 = np.where(near, f, np.sin(f * theta) / safe)
    return quat_normalize(w0 * q0 + w1 * q1)
