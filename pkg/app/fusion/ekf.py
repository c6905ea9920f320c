"""
Quaternion extended Kalman filter fusing IMU and GPS.

State vector x = [p (3), v (3), q (4)] in the ENU navigation frame, with q the
nav-to-vehicle orientation. Process noise w = [w_p (3), w_v (3), w_omega (3)]:
accelerometer noise entering position and velocity, and gyroscope noise.
"""

from typing import Optional, Tuple

import numpy as np
import structlog
from scipy.linalg import block_diag, cho_factor, cho_solve

from app.config.app_config import NoiseConfig
from app.errors import InvalidMeasurementError, NumericalFailureError
from app.fusion.covariance import quat_cov_from_euler_cov
from app.geometry.quaternion import (
    quat_exp,
    quat_exp_jacobian,
    quat_left,
    quat_multiply,
    quat_normalize,
    quat_right,
    rotation_jacobian,
    rotation_matrix_unchecked,
)
from app.models.models import FilterState, GpsObservation, ImuSample

logger = structlog.get_logger(__name__)

STATE_DIM = 10
NOISE_DIM = 9
OBS_DIM = 8
SPEED_EPSILON = 1e-3
MIN_QUAT_NORM = 1e-6


def process_noise_cov(noise: NoiseConfig) -> np.ndarray:
    """C_w = blockdiag(sigma_a^2 I, sigma_a^2 I, sigma_omega^2 I)."""
    return np.diag([noise.sigma_a**2] * 6 + [noise.sigma_omega**2] * 3)


def _corrected_imu(u: ImuSample, noise: NoiseConfig) -> Tuple[np.ndarray, np.ndarray]:
    accel = np.asarray(u.accel, dtype=float) - np.asarray(noise.accel_bias)
    gyro = np.asarray(u.gyro, dtype=float) - np.asarray(noise.gyro_bias)
    return accel, gyro


def transition(
    x: np.ndarray, u: ImuSample, T: float, noise: NoiseConfig, w: Optional[np.ndarray] = None
) -> np.ndarray:
    """State-transition map with explicit process noise w (zero when omitted)."""
    w = np.zeros(NOISE_DIM) if w is None else np.asarray(w, dtype=float)
    p, v, q = x[0:3], x[3:6], x[6:10]
    accel, gyro = _corrected_imu(u, noise)
    a = rotation_matrix_unchecked(q) @ accel + np.asarray(noise.gravity)
    p_next = p + T * v + 0.5 * T * T * (a + w[0:3])
    v_next = v + T * (a + w[3:6])
    q_next = quat_multiply(q, quat_exp(0.5 * T * (gyro + w[6:9])))
    return np.concatenate([p_next, v_next, q_next])


def observe(x: np.ndarray) -> np.ndarray:
    """h(x) = [p, |v|, q]."""
    return np.concatenate([x[0:3], [np.linalg.norm(x[3:6])], x[6:10]])


def transition_jacobians(x: np.ndarray, u: ImuSample, T: float, noise: NoiseConfig) -> Tuple[np.ndarray, np.ndarray]:
    """F (10x10) and G (10x9) of the transition at zero noise."""
    q = x[6:10]
    accel, gyro = _corrected_imu(u, noise)
    half_rate = 0.5 * T * gyro
    dR = rotation_jacobian(q, accel)

    F = np.eye(STATE_DIM)
    F[0:3, 3:6] = T * np.eye(3)
    F[0:3, 6:10] = 0.5 * T * T * dR
    F[3:6, 6:10] = T * dR
    F[6:10, 6:10] = quat_right(quat_exp(half_rate))

    G = np.zeros((STATE_DIM, NOISE_DIM))
    G[0:3, 0:3] = 0.5 * T * T * np.eye(3)
    G[3:6, 3:6] = T * np.eye(3)
    G[6:10, 6:9] = quat_left(q) @ quat_exp_jacobian(half_rate) * (0.5 * T)
    return F, G


def observation_jacobian(x: np.ndarray) -> Tuple[np.ndarray, bool]:
    """H (8x10) and whether the speed row is defined (|v| > SPEED_EPSILON)."""
    H = np.zeros((OBS_DIM, STATE_DIM))
    H[0:3, 0:3] = np.eye(3)
    H[4:8, 6:10] = np.eye(4)
    speed = float(np.linalg.norm(x[3:6]))
    speed_ok = speed > SPEED_EPSILON
    if speed_ok:
        H[3, 3:6] = x[3:6] / speed
    return H, speed_ok


def jacobians(s: FilterState, u: ImuSample, T: float, noise: NoiseConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = s.vector()
    F, G = transition_jacobians(x, u, T, noise)
    H, _ = observation_jacobian(x)
    return F, G, H


def _check_covariance(P: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(P)):
        raise NumericalFailureError(f"{what} produced a non-finite covariance")
    P = 0.5 * (P + P.T)
    scale = max(1.0, float(np.max(np.abs(P))))
    min_eig = float(np.min(np.linalg.eigvalsh(P)))
    if min_eig < -1e-9 * scale:
        raise NumericalFailureError(f"{what} produced a covariance with eigenvalue {min_eig:.3e}")
    return P


def predict(s: FilterState, u: ImuSample, T: float, noise: NoiseConfig) -> FilterState:
    """Propagate mean and covariance over one IMU interval of T seconds."""
    if not T > 0.0:
        raise InvalidMeasurementError(f"prediction interval must be positive, got {T}")
    if not (np.all(np.isfinite(u.accel)) and np.all(np.isfinite(u.gyro))):
        raise InvalidMeasurementError(f"non-finite IMU sample at t={u.t}")

    x = s.vector()
    F, G = transition_jacobians(x, u, T, noise)
    x_next = transition(x, u, T, noise)
    P_next = _check_covariance(F @ s.P @ F.T + G @ process_noise_cov(noise) @ G.T, "predict")
    return renormalize(FilterState.from_vector(x_next, P_next, t=s.t + T))


def renormalize(s: FilterState) -> FilterState:
    """Project q back to unit norm, carrying the covariance through the same map."""
    q = s.q
    n = float(np.linalg.norm(q))
    if n <= MIN_QUAT_NORM:
        raise NumericalFailureError(f"quaternion norm {n:.3e} is degenerate")
    J = np.eye(STATE_DIM)
    J[6:10, 6:10] = (n * n * np.eye(4) - np.outer(q, q)) / n**3
    P = J @ s.P @ J.T
    x = s.vector()
    x[6:10] = q / n
    return FilterState.from_vector(x, 0.5 * (P + P.T), t=s.t, flags=s.flags)


def update(s: FilterState, z: GpsObservation, noise: NoiseConfig) -> FilterState:
    """EKF update on the available observation components, then renormalize."""
    if not (z.has_position or z.has_speed or z.has_orientation):
        raise InvalidMeasurementError(f"GPS observation at t={z.t} carries no component")

    x = s.vector()
    H_full, speed_ok = observation_jacobian(x)
    h_full = observe(x)
    flags = []
    rows, z_parts, r_blocks = [], [], []

    if z.has_position:
        rows.extend(range(0, 3))
        z_parts.append(z.pos)
        r_blocks.append(noise.sigma_gnss**2 * np.eye(3))
    if z.has_speed:
        if speed_ok:
            rows.append(3)
            z_parts.append([z.speed])
            r_blocks.append(np.array([[noise.sigma_v**2]]))
        else:
            flags.append("speed_skipped")
            logger.warning("Speed update skipped at near-zero speed", t=z.t)
    if z.has_orientation:
        z_q = np.asarray(z.quat_obs, dtype=float)
        if np.dot(z_q, s.q) < 0.0:
            z_q = -z_q
        rows.extend(range(4, 8))
        z_parts.append(z_q)
        C_q = quat_cov_from_euler_cov(z_q, noise.C_gamma) + noise.quat_obs_floor * np.eye(4)
        r_blocks.append(C_q)

    if not rows:
        return s.model_copy(update={"flags": tuple(flags + ["update_skipped"])})

    H = H_full[rows]
    R = block_diag(*r_blocks)
    innovation = np.concatenate([np.ravel(part) for part in z_parts]) - h_full[rows]
    S = H @ s.P @ H.T + R
    try:
        factor = cho_factor(0.5 * (S + S.T))
    except np.linalg.LinAlgError:
        logger.warning("Singular innovation covariance, update skipped", t=z.t)
        return s.model_copy(update={"flags": tuple(flags + ["update_skipped"])})

    K = cho_solve(factor, H @ s.P).T
    x_post = x + K @ innovation
    I_KH = np.eye(STATE_DIM) - K @ H
    P_post = _check_covariance(I_KH @ s.P @ I_KH.T + K @ R @ K.T, "update")
    return renormalize(FilterState.from_vector(x_post, P_post, t=s.t, flags=tuple(flags)))


def initial_state(
    p: np.ndarray, v: np.ndarray, q: np.ndarray, noise: NoiseConfig, t: float = 0.0
) -> FilterState:
    """Prior FilterState around (p, v, q) with the configured initial stds."""
    att_var = np.radians(noise.init_att_std_deg) ** 2
    P = block_diag(
        noise.init_pos_std**2 * np.eye(3),
        noise.init_vel_std**2 * np.eye(3),
        quat_cov_from_euler_cov(q, att_var * np.eye(3)) + noise.quat_obs_floor * np.eye(4),
    )
    return FilterState(p=p, v=v, q=quat_normalize(q), P=P, t=t)


class QuaternionEKF:
    """Stateful single-vehicle filter: one predict per IMU tick, updates at GPS times."""

    def __init__(self, noise: NoiseConfig, state: FilterState) -> None:
        self.noise = noise
        self._state = state

    @property
    def state(self) -> FilterState:
        return self._state

    def predict(self, imu: ImuSample, T: Optional[float] = None) -> FilterState:
        dt = imu.t - self._state.t if T is None else T
        self._state = predict(self._state, imu, dt, self.noise)
        return self._state

    def update(self, obs: GpsObservation) -> FilterState:
        self._state = update(self._state, obs, self.noise)
        return self._state

    def step(self, imu: ImuSample, obs: Optional[GpsObservation] = None) -> FilterState:
        self.predict(imu)
        if obs is not None:
            self.update(obs)
        return self._state
