"""
Geometry module: quaternion algebra, frames and LOS angles.
"""

from .frames import (
    DISTANCE_EPSILON,
    los_angle_gradients,
    los_angles,
    los_direction,
    los_frame_quaternion,
    relative_position,
)
from .quaternion import (
    IDENTITY,
    check_unit,
    euler_jacobian,
    euler_to_quat,
    is_gimbal_locked,
    quat_conjugate,
    quat_exp,
    quat_exp_jacobian,
    quat_left,
    quat_multiply,
    quat_normalize,
    quat_right,
    quat_rotate,
    quat_slerp,
    quat_to_euler,
    rotation_jacobian,
    rotation_matrix,
    rotation_matrix_unchecked,
    wrap_angle,
)

__all__ = [
    "DISTANCE_EPSILON",
    "IDENTITY",
    "check_unit",
    "euler_jacobian",
    "euler_to_quat",
    "is_gimbal_locked",
    "los_angle_gradients",
    "los_angles",
    "los_direction",
    "los_frame_quaternion",
    "quat_conjugate",
    "quat_exp",
    "quat_exp_jacobian",
    "quat_left",
    "quat_multiply",
    "quat_normalize",
    "quat_right",
    "quat_rotate",
    "quat_slerp",
    "quat_to_euler",
    "relative_position",
    "rotation_jacobian",
    "rotation_matrix",
    "rotation_matrix_unchecked",
    "wrap_angle",
]
