"""
Trajectory containers: a recorded or synthesized single-vehicle log and the
paired true-state streams of the two vehicles.
"""

from typing import Iterator, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.geometry.quaternion import euler_to_quat
from app.models.models import EulerAngles, FloatArray, ImuSample


class TrajectorySample(BaseModel):
    """One IMU tick of a trajectory with its ground truth."""

    t: float
    p: FloatArray = Field(description="Position, m (ENU)")
    v: FloatArray = Field(description="Velocity, m/s (ENU)")
    euler: EulerAngles = Field(description="Roll, pitch, yaw, rad")
    imu: ImuSample
    gps_valid: bool = True

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class Trajectory(BaseModel):
    """Column-wise trajectory, one row per IMU tick."""

    t: FloatArray = Field(description="(n,) timestamps, s")
    p: FloatArray = Field(description="(n, 3) positions, m")
    v: FloatArray = Field(description="(n, 3) velocities, m/s")
    euler: FloatArray = Field(description="(n, 3) roll, pitch, yaw, rad")
    accel: FloatArray = Field(description="(n, 3) specific force, m/s^2")
    gyro: FloatArray = Field(description="(n, 3) body rates, rad/s")
    gps_valid: np.ndarray = Field(description="(n,) GPS availability")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("gps_valid", mode="before")
    @classmethod
    def _bool(cls, value: object) -> np.ndarray:
        return np.asarray(value, dtype=bool)

    @model_validator(mode="after")
    def _shapes(self) -> "Trajectory":
        n = self.t.shape[0]
        if self.t.ndim != 1 or n == 0:
            raise ValueError("trajectory needs at least one sample")
        for name in ("p", "v", "euler", "accel", "gyro"):
            if getattr(self, name).shape != (n, 3):
                raise ValueError(f"{name} must have shape ({n}, 3)")
        if self.gps_valid.shape != (n,):
            raise ValueError(f"gps_valid must have shape ({n},)")
        if n > 1 and not np.all(np.diff(self.t) > 0.0):
            raise ValueError("timestamps must be strictly increasing")
        return self

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def rate(self) -> float:
        """Mean sample rate, Hz."""
        if len(self) < 2:
            return 0.0
        return (len(self) - 1) / self.duration

    @property
    def quaternions(self) -> np.ndarray:
        return euler_to_quat(self.euler)

    @property
    def speed(self) -> np.ndarray:
        return np.linalg.norm(self.v, axis=1)

    def samples(self) -> Iterator[TrajectorySample]:
        for i in range(len(self)):
            yield TrajectorySample(
                t=float(self.t[i]),
                p=self.p[i],
                v=self.v[i],
                euler=EulerAngles(*self.euler[i]),
                imu=ImuSample(t=float(self.t[i]), accel=self.accel[i], gyro=self.gyro[i]),
                gps_valid=bool(self.gps_valid[i]),
            )

    def gaps(self) -> List[Tuple[float, float]]:
        """(start, end) timestamps of each run of samples without GPS."""
        missing = ~self.gps_valid
        if not missing.any():
            return []
        edges = np.diff(np.concatenate([[0], missing.astype(int), [0]]))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1) - 1
        return [(float(self.t[s]), float(self.t[e])) for s, e in zip(starts, ends)]


class VehicleTrack(BaseModel):
    """True state stream of one vehicle on the common time grid."""

    t: FloatArray
    p: FloatArray = Field(description="(n, 3) positions, m")
    v: FloatArray = Field(description="(n, 3) velocities, m/s")
    q: FloatArray = Field(description="(n, 4) orientations")
    gps_valid: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("gps_valid", mode="before")
    @classmethod
    def _bool(cls, value: object) -> np.ndarray:
        return np.asarray(value, dtype=bool)

    def __len__(self) -> int:
        return int(self.t.shape[0])


class VehiclePair(BaseModel):
    """Leader (Tx, vehicle 1) and follower (Rx, vehicle 2) on one time grid."""

    lead: VehicleTrack
    follow: VehicleTrack
    delta_t_gap: float = Field(gt=0.0)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _aligned(self) -> "VehiclePair":
        if len(self.lead) != len(self.follow) or not np.array_equal(self.lead.t, self.follow.t):
            raise ValueError("lead and follow tracks must share one time grid")
        return self

    def __len__(self) -> int:
        return len(self.lead)

    @property
    def t(self) -> np.ndarray:
        return self.lead.t

    @property
    def distance(self) -> np.ndarray:
        return np.linalg.norm(self.lead.p - self.follow.p, axis=1)
