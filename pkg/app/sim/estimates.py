"""
Noisy state estimates for one vehicle.

`sampled` draws errors around the truth from scenario covariances;
`full_ekf` runs the quaternion EKF on the trajectory's IMU stream with
synthetic GPS observations.
"""

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

from app.config.app_config import NoiseConfig
from app.fusion.covariance import euler_cov_from_quat_cov, quat_cov_from_euler_cov
from app.fusion.ekf import QuaternionEKF, initial_state
from app.geometry.quaternion import euler_to_quat, quat_to_euler
from app.models.models import FloatArray, GpsObservation, ImuSample, PeerEstimate
from app.models.trajectory_models import Trajectory, VehicleTrack

logger = structlog.get_logger(__name__)


class EstimateStream(BaseModel):
    """Per-step estimates of one vehicle on the pair grid."""

    t: FloatArray
    p_hat: FloatArray
    v_hat: FloatArray
    q_hat: FloatArray
    C_p: FloatArray
    C_q: FloatArray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def at(self, k: int) -> PeerEstimate:
        return PeerEstimate(
            p_hat=self.p_hat[k],
            C_p_hat=self.C_p[k],
            q_hat=self.q_hat[k],
            C_q_hat=self.C_q[k],
            timestamp=float(self.t[k]),
            v_hat=self.v_hat[k],
        )

    def euler_cov(self, k: int) -> np.ndarray:
        return euler_cov_from_quat_cov(self.q_hat[k], self.C_q[k])


def perturb_orientation(q: np.ndarray, C_gamma: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Orientations whose Euler angles are offset by N(0, C_gamma) draws."""
    euler = np.array([quat_to_euler(qi) for qi in np.atleast_2d(q)])
    noisy = euler + rng.multivariate_normal(np.zeros(3), C_gamma, size=len(euler))
    return euler_to_quat(noisy)


def sampled_estimates(
    track: VehicleTrack, C_p: np.ndarray, C_gamma: np.ndarray, rng: np.random.Generator
) -> EstimateStream:
    """Truth plus Gaussian errors with the given position and Euler covariances."""
    n = len(track)
    p_hat = track.p + rng.multivariate_normal(np.zeros(3), C_p, size=n)
    q_hat = perturb_orientation(track.q, C_gamma, rng)
    C_q = np.array([quat_cov_from_euler_cov(q, C_gamma) for q in q_hat])
    return EstimateStream(
        t=track.t,
        p_hat=p_hat,
        v_hat=track.v,
        q_hat=q_hat,
        C_p=np.broadcast_to(C_p, (n, 3, 3)).copy(),
        C_q=C_q,
    )


def ekf_estimates(
    traj: Trajectory,
    t_query: np.ndarray,
    noise: NoiseConfig,
    gps_rate: float,
    rng: np.random.Generator,
) -> EstimateStream:
    """Run the EKF over the whole trajectory and read it out at t_query."""
    q_true = traj.quaternions
    gps_every = max(1, int(round(traj.rate / gps_rate)))
    ekf = QuaternionEKF(noise, initial_state(traj.p[0], traj.v[0], q_true[0], noise, t=float(traj.t[0])))
    n = len(traj)
    p_hat, v_hat, q_hat = np.zeros((n, 3)), np.zeros((n, 3)), np.zeros((n, 4))
    C_p, C_q = np.zeros((n, 3, 3)), np.zeros((n, 4, 4))
    skipped = 0

    for k in range(n):
        if k > 0:
            ekf.predict(ImuSample(t=float(traj.t[k]), accel=traj.accel[k], gyro=traj.gyro[k]))
        if k % gps_every == 0 and traj.gps_valid[k]:
            obs = synthesize_gps(traj, q_true[k], k, noise, rng)
            state = ekf.update(obs)
            skipped += "update_skipped" in state.flags
        state = ekf.state
        p_hat[k], v_hat[k], q_hat[k] = state.p, state.v, state.q
        C_p[k], C_q[k] = state.position_cov, state.quat_cov

    if skipped:
        logger.warning("EKF updates skipped", count=skipped)
    index = np.clip(np.rint((t_query - traj.t[0]) * traj.rate).astype(int), 0, n - 1)
    return EstimateStream(
        t=np.asarray(t_query, dtype=float),
        p_hat=p_hat[index],
        v_hat=v_hat[index],
        q_hat=q_hat[index],
        C_p=C_p[index],
        C_q=C_q[index],
    )


def synthesize_gps(
    traj: Trajectory, q: np.ndarray, k: int, noise: NoiseConfig, rng: np.random.Generator
) -> GpsObservation:
    """GPS fix at sample k: noisy position, speed and heading-derived orientation."""
    pos = traj.p[k] + rng.normal(0.0, noise.sigma_gnss, size=3)
    speed = max(0.0, float(np.linalg.norm(traj.v[k])) + rng.normal(0.0, noise.sigma_v))
    quat_obs = perturb_orientation(q, noise.C_gamma, rng)[0]
    return GpsObservation(t=float(traj.t[k]), pos=pos, speed=speed, quat_obs=quat_obs)


def vehicle_estimates(
    mode: str,
    track: VehicleTrack,
    traj: Trajectory,
    time_offset: float,
    noise: NoiseConfig,
    C_p: np.ndarray,
    C_gamma: np.ndarray,
    gps_rate: float,
    rng: np.random.Generator,
) -> EstimateStream:
    """Estimates for a vehicle whose route time is pair time minus time_offset."""
    if mode == "sampled":
        return sampled_estimates(track, C_p, C_gamma, rng)
    stream = ekf_estimates(traj, track.t - time_offset, noise, gps_rate, rng)
    return stream.model_copy(update={"t": track.t})

