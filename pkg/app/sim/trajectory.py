"""
Trajectory sources: the segment generator, CSV logs and resampling.

Generated trajectories are kinematically exact: speed follows a constant
tangential acceleration per segment (v^2 linear in arc length), heading
follows the segment curvature and the IMU columns are derived analytically
from the same motion.
"""

import math
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
import structlog

from app.config.app_config import AppConfig, NoiseConfig, SegmentConfig, TrajectoryConfig
from app.errors import ConfigError, TrajectoryFormatError
from app.geometry.quaternion import euler_to_quat, rotation_matrix_unchecked, wrap_angle
from app.models.trajectory_models import Trajectory

logger = structlog.get_logger(__name__)

CSV_COLUMNS = [
    "t", "px", "py", "pz", "vx", "vy", "vz", "roll", "pitch", "yaw",
    "ax", "ay", "az", "wx", "wy", "wz", "gps_valid",
]
GRAVITY = np.array([0.0, 0.0, -9.80665])


class _Piece:
    """One segment resolved to start state, length, curvature and timing."""

    def __init__(self, segment: SegmentConfig, v0: float, p0: np.ndarray, heading0: float, t0: float) -> None:
        if segment.kind == "straight":
            self.length = float(segment.length)
            self.curvature = 0.0
        else:
            self.length = float(segment.radius) * math.radians(abs(segment.angle_deg))
            self.curvature = math.copysign(1.0 / float(segment.radius), segment.angle_deg)
        self.v0 = v0
        self.v1 = v0 if segment.speed_end is None else float(segment.speed_end)
        if self.v0 <= 0.0 and self.v1 <= 0.0:
            raise ConfigError("segment cannot start and end at zero speed")
        self.accel = (self.v1**2 - self.v0**2) / (2.0 * self.length)
        if self.accel == 0.0:
            self.duration = self.length / self.v0
        else:
            self.duration = (self.v1 - self.v0) / self.accel
        self.p0 = p0
        self.heading0 = heading0
        self.t0 = t0

    def state(self, tau: np.ndarray):
        """Position, heading, speed at local times tau."""
        s = self.v0 * tau + 0.5 * self.accel * tau * tau
        v = self.v0 + self.accel * tau
        heading = self.heading0 + self.curvature * s
        if self.curvature == 0.0:
            dx = s * math.cos(self.heading0)
            dy = s * math.sin(self.heading0)
        else:
            dx = (np.sin(heading) - math.sin(self.heading0)) / self.curvature
            dy = (math.cos(self.heading0) - np.cos(heading)) / self.curvature
        p = self.p0 + np.stack([dx, dy, np.zeros_like(dx)], axis=-1)
        return p, heading, v

    def end(self):
        p, heading, v = self.state(np.array([self.duration]))
        return p[0], float(heading[0]), float(v[0])


def _pieces(cfg: TrajectoryConfig) -> List[_Piece]:
    pieces: List[_Piece] = []
    v, p, heading, t = cfg.initial_speed, np.zeros(3), 0.0, 0.0
    max_rate = math.radians(cfg.max_yaw_rate_deg)
    for segment in cfg.segments * cfg.laps:
        piece = _Piece(segment, v, p, heading, t)
        yaw_rate = max(piece.v0, piece.v1) * abs(piece.curvature)
        if yaw_rate > max_rate + 1e-12:
            raise ConfigError(
                f"arc of radius {segment.radius} m exceeds the yaw-rate cap "
                f"({math.degrees(yaw_rate):.1f} > {cfg.max_yaw_rate_deg} deg/s)"
            )
        pieces.append(piece)
        p, heading, v = piece.end()
        t += piece.duration
    return pieces


def generate_trajectory(
    cfg: TrajectoryConfig,
    rate: float,
    noise: Optional[NoiseConfig] = None,
    rng: Optional[np.random.Generator] = None,
) -> Trajectory:
    """Sample the segment route at `rate` Hz with synthesized IMU readings."""
    pieces = _pieces(cfg)
    total = sum(piece.duration for piece in pieces)
    n = int(math.floor(total * rate + 1e-9)) + 1
    t = np.arange(n) / rate

    starts = np.array([piece.t0 for piece in pieces])
    index = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(pieces) - 1)
    p = np.zeros((n, 3))
    heading = np.zeros(n)
    speed = np.zeros(n)
    tangential = np.zeros(n)
    curvature = np.zeros(n)
    for i, piece in enumerate(pieces):
        mask = index == i
        if not mask.any():
            continue
        tau = np.minimum(t[mask] - piece.t0, piece.duration)
        p[mask], heading[mask], speed[mask] = piece.state(tau)
        tangential[mask] = piece.accel
        curvature[mask] = piece.curvature

    amp = math.radians(cfg.vibration_amplitude_deg)
    omega = 2.0 * math.pi * cfg.vibration_frequency_hz
    roll = amp * np.sin(omega * t)
    pitch = amp * np.sin(omega * t + math.pi / 3.0)
    roll_rate = amp * omega * np.cos(omega * t)
    pitch_rate = amp * omega * np.cos(omega * t + math.pi / 3.0)
    yaw_rate = speed * curvature

    ch, sh = np.cos(heading), np.sin(heading)
    zero = np.zeros(n)
    v = np.stack([speed * ch, speed * sh, zero], axis=1)
    a_nav = tangential[:, None] * np.stack([ch, sh, zero], axis=1) + (speed**2 * curvature)[:, None] * np.stack(
        [-sh, ch, zero], axis=1
    )
    gravity = GRAVITY if noise is None else np.asarray(noise.gravity)
    euler = np.stack([roll, pitch, wrap_angle(heading)], axis=1)
    R = rotation_matrix_unchecked(euler_to_quat(euler))
    accel = np.einsum("nji,nj->ni", R, a_nav - gravity)
    gyro = np.stack(
        [
            roll_rate - yaw_rate * np.sin(pitch),
            pitch_rate * np.cos(roll) + yaw_rate * np.sin(roll) * np.cos(pitch),
            -pitch_rate * np.sin(roll) + yaw_rate * np.cos(roll) * np.cos(pitch),
        ],
        axis=1,
    )

    if cfg.imu_noise and noise is not None:
        rng = rng or np.random.default_rng()
        accel = accel + np.asarray(noise.accel_bias) + rng.normal(0.0, noise.sigma_a, size=(n, 3))
        gyro = gyro + np.asarray(noise.gyro_bias) + rng.normal(0.0, noise.sigma_omega, size=(n, 3))

    logger.info("Trajectory generated", samples=n, duration=float(t[-1]), segments=len(pieces))
    return Trajectory(
        t=t, p=p, v=v, euler=euler, accel=accel, gyro=gyro, gps_valid=np.ones(n, dtype=bool)
    )


def _parse_gps_flag(column: pd.Series) -> pd.Series:
    text = column.astype(str).str.strip().str.lower()
    mapping = {"1": 1.0, "0": 0.0, "true": 1.0, "false": 0.0, "1.0": 1.0, "0.0": 0.0}
    return text.map(mapping)


def load_trajectory(path: Path | str) -> Trajectory:
    """Read a trajectory CSV; malformed rows are reported with their line number."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except FileNotFoundError as e:
        raise TrajectoryFormatError(f"trajectory file not found: {path}") from e
    except pd.errors.EmptyDataError as e:
        raise TrajectoryFormatError(f"trajectory file is empty: {path}") from e
    except pd.errors.ParserError as e:
        raise TrajectoryFormatError(f"cannot parse {path}: {e}") from e

    if list(frame.columns) != CSV_COLUMNS:
        raise TrajectoryFormatError(f"header must be {','.join(CSV_COLUMNS)}", line=1)
    if frame.empty:
        raise TrajectoryFormatError(f"trajectory file has no samples: {path}")

    numeric = frame[CSV_COLUMNS[:-1]].apply(pd.to_numeric, errors="coerce")
    gps = _parse_gps_flag(frame["gps_valid"])
    bad = numeric.isna().any(axis=1) | gps.isna() | ~np.isfinite(numeric.to_numpy()).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise TrajectoryFormatError("malformed or non-finite value", line=row + 2)

    t = numeric["t"].to_numpy()
    steps = np.diff(t)
    if np.any(steps <= 0.0):
        row = int(np.flatnonzero(steps <= 0.0)[0]) + 1
        raise TrajectoryFormatError("timestamps must be strictly increasing", line=row + 2)

    traj = Trajectory(
        t=t,
        p=numeric[["px", "py", "pz"]].to_numpy(),
        v=numeric[["vx", "vy", "vz"]].to_numpy(),
        euler=numeric[["roll", "pitch", "yaw"]].to_numpy(),
        accel=numeric[["ax", "ay", "az"]].to_numpy(),
        gyro=numeric[["wx", "wy", "wz"]].to_numpy(),
        gps_valid=gps.to_numpy() > 0.5,
    )
    gaps = traj.gaps()
    logger.info("Trajectory loaded", path=str(path), samples=len(traj), gps_gaps=len(gaps))
    return traj


def save_trajectory(traj: Trajectory, path: Path | str) -> Path:
    """Write a trajectory in the CSV schema read by load_trajectory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([traj.t, traj.p, traj.v, traj.euler, traj.accel, traj.gyro])
    frame = pd.DataFrame(data, columns=CSV_COLUMNS[:-1])
    frame["gps_valid"] = traj.gps_valid.astype(int)
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def resample_trajectory(traj: Trajectory, rate: float) -> Trajectory:
    """Linear interpolation onto a uniform grid at `rate` Hz; yaw is unwrapped first."""
    n = int(math.floor(traj.duration * rate + 1e-9)) + 1
    t = traj.t[0] + np.arange(n) / rate

    def interp(columns: np.ndarray) -> np.ndarray:
        return np.column_stack([np.interp(t, traj.t, columns[:, j]) for j in range(columns.shape[1])])

    euler = traj.euler.copy()
    euler[:, 2] = np.unwrap(euler[:, 2])
    euler = interp(euler)
    euler[:, 2] = wrap_angle(euler[:, 2])
    previous = np.clip(np.searchsorted(traj.t, t, side="right") - 1, 0, len(traj) - 1)
    return Trajectory(
        t=t,
        p=interp(traj.p),
        v=interp(traj.v),
        euler=euler,
        accel=interp(traj.accel),
        gyro=interp(traj.gyro),
        gps_valid=traj.gps_valid[previous],
    )


def build_trajectory(config: AppConfig, rng: Optional[np.random.Generator] = None) -> Trajectory:
    """Trajectory for a run: the configured CSV (resampled to f_data) or the generated route."""
    rate = config.simulation.f_data
    if config.trajectory.path:
        traj = load_trajectory(config.trajectory.path)
        if len(traj) < 2 or abs(traj.rate - rate) > 1e-6 * rate:
            traj = resample_trajectory(traj, rate)
        return traj
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(config.simulation.seed).spawn(3)[2])
    return generate_trajectory(config.trajectory, rate, config.noise, rng)
