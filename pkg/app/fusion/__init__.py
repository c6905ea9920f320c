"""
Fusion module: quaternion EKF and covariance mappings.
"""

from .covariance import aligned_euler_jacobian, euler_cov_from_quat_cov, quat_cov_from_euler_cov, require_psd
from .ekf import (
    QuaternionEKF,
    initial_state,
    jacobians,
    observation_jacobian,
    observe,
    predict,
    process_noise_cov,
    renormalize,
    transition,
    transition_jacobians,
    update,
)

__all__ = [
    "QuaternionEKF",
    "aligned_euler_jacobian",
    "euler_cov_from_quat_cov",
    "initial_state",
    "jacobians",
    "observation_jacobian",
    "observe",
    "predict",
    "process_noise_cov",
    "quat_cov_from_euler_cov",
    "renormalize",
    "require_psd",
    "transition",
    "transition_jacobians",
    "update",
]
