"""
Core data models for the BPC simulator.

Small angle tuples are NamedTuples so they also hold numpy arrays when the
geometry runs batched; sensor samples and estimates are pydantic models.
"""

from math import degrees, radians
from typing import Annotated, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator


def _as_float_array(value: object) -> np.ndarray:
    return np.array(value, dtype=float)


FloatArray = Annotated[np.ndarray, BeforeValidator(_as_float_array)]


def _check_shape(value: np.ndarray, shape: Tuple[int, ...], name: str) -> np.ndarray:
    if value.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {value.shape}")
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{name} must be finite")
    return value


class EulerAngles(NamedTuple):
    """Intrinsic ZYX angles in radians: roll about x, pitch about y, yaw about z."""

    roll: float
    pitch: float
    yaw: float


class LosAngles(NamedTuple):
    """Azimuth in (-pi, pi] and elevation in [-pi/2, pi/2], radians."""

    azimuth: float
    elevation: float


class PointingError(NamedTuple):
    """Angular offset of the peer from the beam axis, radians."""

    d_az: float
    d_el: float


class Beamwidth(NamedTuple):
    """Full -3 dB beamwidths in radians."""

    az: float
    el: float

    @classmethod
    def from_degrees(cls, az: float, el: Optional[float] = None) -> "Beamwidth":
        return cls(radians(az), radians(az if el is None else el))

    def to_degrees(self) -> Tuple[float, float]:
        return degrees(self.az), degrees(self.el)


class ImuSample(BaseModel):
    """One IMU tick: specific force and body rates in the vehicle frame."""

    t: float = Field(description="Timestamp in seconds")
    accel: FloatArray = Field(description="Specific force, m/s^2")
    gyro: FloatArray = Field(description="Angular rate, rad/s")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("accel", "gyro", mode="before")
    @classmethod
    def _vector(cls, value: object) -> np.ndarray:
        # non-finite samples are rejected by predict() with its own error type
        arr = _as_float_array(value)
        if arr.shape != (3,):
            raise ValueError(f"IMU vectors must have shape (3,), got {arr.shape}")
        return arr


class GpsObservation(BaseModel):
    """GPS-derived observation; a component set to None is unavailable."""

    t: float = Field(description="Timestamp in seconds")
    pos: Optional[FloatArray] = Field(default=None, description="Position, m (nav frame)")
    speed: Optional[float] = Field(default=None, ge=0.0, description="Ground speed, m/s")
    quat_obs: Optional[FloatArray] = Field(
        default=None, description="Orientation from heading plus pitch/roll, scalar-first"
    )

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("pos")
    @classmethod
    def _pos(cls, value: Optional[np.ndarray]) -> Optional[np.ndarray]:
        return None if value is None else _check_shape(value, (3,), "pos")

    @field_validator("quat_obs")
    @classmethod
    def _quat(cls, value: Optional[np.ndarray]) -> Optional[np.ndarray]:
        if value is None:
            return None
        _check_shape(value, (4,), "quat_obs")
        if abs(np.linalg.norm(value) - 1.0) > 1e-6:
            raise ValueError("quat_obs must be a unit quaternion")
        return value

    @property
    def has_position(self) -> bool:
        return self.pos is not None

    @property
    def has_speed(self) -> bool:
        return self.speed is not None

    @property
    def has_orientation(self) -> bool:
        return self.quat_obs is not None


class FilterState(BaseModel):
    """EKF state [p, v, q] with its 10x10 covariance."""

    p: FloatArray = Field(description="Position, m (nav frame)")
    v: FloatArray = Field(description="Velocity, m/s (nav frame)")
    q: FloatArray = Field(description="Nav-to-vehicle orientation, scalar-first")
    P: FloatArray = Field(description="State covariance, 10x10")
    t: float = Field(default=0.0, description="Time of the estimate, s")
    flags: Tuple[str, ...] = Field(default=(), description="Conditions raised by the last step")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("p", "v")
    @classmethod
    def _vec3(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (3,), "state vector")

    @field_validator("q")
    @classmethod
    def _quat(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (4,), "q")

    @field_validator("P")
    @classmethod
    def _cov(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (10, 10), "P")

    def vector(self) -> np.ndarray:
        """Stacked mean [p, v, q]."""
        return np.concatenate([self.p, self.v, self.q])

    @classmethod
    def from_vector(
        cls, x: np.ndarray, P: np.ndarray, t: float = 0.0, flags: Tuple[str, ...] = ()
    ) -> "FilterState":
        return cls(p=x[0:3], v=x[3:6], q=x[6:10], P=P, t=t, flags=flags)

    @property
    def position_cov(self) -> np.ndarray:
        return self.P[0:3, 0:3]

    @property
    def quat_cov(self) -> np.ndarray:
        return self.P[6:10, 6:10]


class PeerEstimate(BaseModel):
    """A vehicle's estimate as exchanged over the control link."""

    p_hat: FloatArray = Field(description="Estimated position, m (nav frame)")
    C_p_hat: FloatArray = Field(description="Position covariance, m^2")
    q_hat: FloatArray = Field(description="Estimated nav-to-vehicle orientation")
    C_q_hat: FloatArray = Field(description="Quaternion covariance, 4x4")
    timestamp: float = Field(default=0.0, description="Time the estimate refers to, s")
    v_hat: Optional[FloatArray] = Field(default=None, description="Estimated velocity, m/s")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("p_hat")
    @classmethod
    def _p(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (3,), "p_hat")

    @field_validator("v_hat")
    @classmethod
    def _v(cls, value: Optional[np.ndarray]) -> Optional[np.ndarray]:
        return None if value is None else _check_shape(value, (3,), "v_hat")

    @field_validator("C_p_hat")
    @classmethod
    def _cp(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (3, 3), "C_p_hat")

    @field_validator("q_hat")
    @classmethod
    def _q(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (4,), "q_hat")

    @field_validator("C_q_hat")
    @classmethod
    def _cq(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (4, 4), "C_q_hat")

    def advanced(self, dt: float) -> "PeerEstimate":
        """Constant-velocity extrapolation of the position by dt seconds."""
        if self.v_hat is None or dt <= 0.0:
            return self
        return self.model_copy(update={"p_hat": self.p_hat + self.v_hat * dt})
