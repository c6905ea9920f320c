"""
Two-vehicle pairing: the follower drives the leader's route delta_t_gap
seconds later.
"""

import math

import numpy as np

from app.errors import ConfigError, DegenerateGeometryError
from app.geometry.frames import DISTANCE_EPSILON
from app.geometry.quaternion import quat_slerp
from app.models.trajectory_models import Trajectory, VehiclePair, VehicleTrack


def _delayed(traj: Trajectory, q: np.ndarray, t_query: np.ndarray) -> VehicleTrack:
    idx = np.clip(np.searchsorted(traj.t, t_query, side="right") - 1, 0, len(traj) - 2)
    frac = (t_query - traj.t[idx]) / (traj.t[idx + 1] - traj.t[idx])
    f = frac[:, None]
    return VehicleTrack(
        t=t_query,
        p=traj.p[idx] + f * (traj.p[idx + 1] - traj.p[idx]),
        v=traj.v[idx] + f * (traj.v[idx + 1] - traj.v[idx]),
        q=quat_slerp(q[idx], q[idx + 1], frac),
        gps_valid=traj.gps_valid[idx],
    )


def pair_vehicles(traj: Trajectory, delta_t_gap: float) -> VehiclePair:
    """Leader at t and follower at t - delta_t_gap, on the leader's sample grid."""
    if delta_t_gap <= 0.0:
        raise DegenerateGeometryError(f"time gap must be positive, got {delta_t_gap} s")
    if len(traj) < 2 or delta_t_gap >= traj.duration:
        raise ConfigError(f"time gap {delta_t_gap} s is not shorter than the trajectory ({traj.duration:.3f} s)")

    q = traj.quaternions
    keep = traj.t >= traj.t[0] + delta_t_gap - 1e-9
    t = traj.t[keep]
    lead = VehicleTrack(t=t, p=traj.p[keep], v=traj.v[keep], q=q[keep], gps_valid=traj.gps_valid[keep])
    follow = _delayed(traj, q, t - delta_t_gap)
    follow = follow.model_copy(update={"t": t})

    pair = VehiclePair(lead=lead, follow=follow, delta_t_gap=delta_t_gap)
    if np.min(pair.distance) <= DISTANCE_EPSILON:
        raise DegenerateGeometryError("vehicles coincide at some step; is the route stationary?")
    return pair


def staleness_steps(latency_tau: float, f_data: float) -> int:
    """Whole sampling periods of delay a control-link latency amounts to."""
    return int(math.ceil(latency_tau * f_data - 1e-9))
