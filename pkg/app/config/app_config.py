"""
Application configuration management.

Sections mirror the simulator's concerns: link budget, sensor noise,
simulation protocol and trajectory. Angles are degrees here and radians
everywhere else.
"""

import json
import math
import os
import tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.errors import ConfigError

logger = structlog.get_logger(__name__)


class LinkConfig(BaseModel):
    """Configuration for the beam-based LOS link budget."""

    f0: float = Field(default=28e9, gt=0.0, description="Carrier frequency, Hz")
    bandwidth: float = Field(default=400e6, gt=0.0, description="Signal bandwidth, Hz")
    noise_power: float = Field(default=-81.0, description="Noise power over the bandwidth, dBm")
    eirp_max: float = Field(default=43.0, description="EIRP limit, dBm")
    ber_target: float = Field(default=1.3e-2, gt=0.0, lt=0.5, description="Target BER (BPSK + FEC)")
    snr_min: Optional[float] = Field(default=None, description="SNR threshold, dB; derived from ber_target if omitted")
    gain_constant: Optional[float] = Field(
        default=None, gt=0.0, description="K_g in G_max = K_g/(az*el); calibrated from the anchor if omitted"
    )
    power_margin: float = Field(default=0.0, ge=0.0, description="Extra Tx power margin, dB")
    omega_min_deg: float = Field(default=1.8, gt=0.0, description="Narrowest selectable beamwidth, deg")
    omega_max_deg: float = Field(default=120.0, gt=0.0, le=180.0, description="Widest selectable beamwidth, deg")
    anchor_beam_deg: float = Field(default=20.0, gt=0.0, description="Calibration anchor beamwidth, deg")
    anchor_distance: float = Field(default=100.0, gt=0.0, description="Calibration anchor distance, m")
    anchor_snr: float = Field(default=10.0, description="Calibration anchor boresight SNR, dB")
    anchor_ptx: float = Field(default=0.0, description="Calibration anchor Tx power, dBm")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _derive(self) -> "LinkConfig":
        from app.channel.calibration import anchor_gain_constant, snr_min_from_ber

        if not math.isfinite(self.eirp_max):
            raise ValueError("eirp_max must be finite")
        if self.omega_min_deg >= self.omega_max_deg:
            raise ValueError("omega_min_deg must be below omega_max_deg")
        if self.snr_min is None:
            self.snr_min = snr_min_from_ber(self.ber_target)
        if self.gain_constant is None:
            self.gain_constant = anchor_gain_constant(
                beam=math.radians(self.anchor_beam_deg),
                distance=self.anchor_distance,
                snr_db=self.anchor_snr,
                ptx_dbm=self.anchor_ptx,
                f0=self.f0,
                noise_power=self.noise_power,
            )
        return self

    @property
    def omega_min(self) -> float:
        return math.radians(self.omega_min_deg)

    @property
    def omega_max(self) -> float:
        return math.radians(self.omega_max_deg)


class NoiseConfig(BaseModel):
    """Sensor noise, biases and gravity used by the fusion filter."""

    sigma_a: float = Field(default=0.05, gt=0.0, description="Accelerometer noise std, m/s^2")
    sigma_omega: float = Field(default=0.002, gt=0.0, description="Gyroscope noise std, rad/s")
    sigma_gnss: float = Field(default=1.0, gt=0.0, description="GNSS position noise std per axis, m")
    sigma_v: float = Field(default=0.1, gt=0.0, description="GNSS speed noise std, m/s")
    euler_std_deg: List[float] = Field(
        default_factory=lambda: [0.5, 0.5, 1.0],
        min_length=3,
        max_length=3,
        description="Roll, pitch, yaw observation std, deg",
    )
    accel_bias: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0], min_length=3, max_length=3)
    gyro_bias: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0], min_length=3, max_length=3)
    gravity: List[float] = Field(default_factory=lambda: [0.0, 0.0, -9.80665], min_length=3, max_length=3)
    quat_obs_floor: float = Field(default=1e-8, gt=0.0, description="Isotropic floor on the quaternion observation covariance")
    init_pos_std: float = Field(default=1.0, gt=0.0, description="Prior position std, m")
    init_vel_std: float = Field(default=0.5, gt=0.0, description="Prior velocity std, m/s")
    init_att_std_deg: float = Field(default=1.0, gt=0.0, description="Prior attitude std per Euler angle, deg")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _positive_stds(self) -> "NoiseConfig":
        if any(s <= 0.0 for s in self.euler_std_deg):
            raise ValueError("euler_std_deg entries must be positive")
        return self

    @property
    def C_gamma(self) -> np.ndarray:
        return np.diag(np.radians(self.euler_std_deg) ** 2)


class SegmentConfig(BaseModel):
    """One piece of a synthetic route: a straight or a circular arc."""

    kind: Literal["straight", "arc"] = Field(description="Segment type")
    length: Optional[float] = Field(default=None, gt=0.0, description="Straight length, m")
    radius: Optional[float] = Field(default=None, description="Arc radius, m")
    angle_deg: Optional[float] = Field(default=None, description="Arc heading change, deg (positive = left)")
    speed_end: Optional[float] = Field(default=None, ge=0.0, description="Speed at segment end, m/s")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _shape(self) -> "SegmentConfig":
        if self.kind == "straight" and self.length is None:
            raise ValueError("straight segment needs a length")
        if self.kind == "arc":
            if self.radius is None or self.radius <= 0.0:
                raise ValueError("arc segment needs a positive radius")
            if not self.angle_deg:
                raise ValueError("arc segment needs a non-zero angle_deg")
        return self


def _roundabout_corner() -> List[SegmentConfig]:
    return [
        SegmentConfig(kind="arc", radius=15.0, angle_deg=-30.0),
        SegmentConfig(kind="arc", radius=15.0, angle_deg=150.0),
        SegmentConfig(kind="arc", radius=15.0, angle_deg=-30.0),
    ]


def default_circuit() -> List[SegmentConfig]:
    """Closed loop of fast straights and slow roundabouts (~1.6 km, ~3 min)."""
    long_side = [
        SegmentConfig(kind="straight", length=120.0, speed_end=27.0),
        SegmentConfig(kind="straight", length=300.0, speed_end=27.0),
        SegmentConfig(kind="straight", length=140.0, speed_end=2.5),
    ]
    short_side = [
        SegmentConfig(kind="straight", length=60.0, speed_end=14.0),
        SegmentConfig(kind="straight", length=80.0, speed_end=14.0),
        SegmentConfig(kind="straight", length=60.0, speed_end=2.5),
    ]
    side_pair = long_side + _roundabout_corner() + short_side + _roundabout_corner()
    return side_pair + [segment.model_copy() for segment in side_pair]


class TrajectoryConfig(BaseModel):
    """Where the trajectory comes from: a CSV log or the segment generator."""

    path: Optional[str] = Field(default=None, description="Trajectory CSV; generated when omitted")
    initial_speed: float = Field(default=2.5, ge=0.0, description="Speed at the first segment, m/s")
    segments: List[SegmentConfig] = Field(default_factory=default_circuit)
    laps: int = Field(default=1, ge=1, description="Repetitions of the segment list")
    max_yaw_rate_deg: float = Field(default=20.0, gt=0.0, description="Yaw-rate cap on arcs, deg/s")
    vibration_amplitude_deg: float = Field(default=0.0, ge=0.0, description="Roll/pitch vibration amplitude, deg")
    vibration_frequency_hz: float = Field(default=1.5, gt=0.0, description="Roll/pitch vibration frequency, Hz")
    imu_noise: bool = Field(default=True, description="Add NoiseConfig noise and bias to synthesized IMU")

    model_config = ConfigDict(extra="forbid")


class SimConfig(BaseModel):
    """Simulation protocol: pairing, latency, sampling, scenario noise, mode."""

    mode: Literal["heuristic", "fixed", "optimizer"] = Field(default="heuristic", description="Decision mode")
    fusion_mode: Literal["sampled", "full_ekf"] = Field(default="sampled", description="Estimate generation")
    delta_t_gap: float = Field(default=3.0, gt=0.0, description="Time gap between the vehicles, s")
    latency_tau: float = Field(default=0.01, ge=0.0, description="Control-link latency, s")
    f_data: float = Field(default=100.0, gt=0.0, description="Estimate sampling rate, Hz")
    gps_rate: float = Field(default=10.0, gt=0.0, description="GPS rate for full_ekf fusion, Hz")
    sigma_p: float = Field(default=1.5, ge=0.0, description="Position error, sqrt of covariance trace, m")
    sigma_gamma_deg: float = Field(default=1.5, ge=0.0, description="Orientation error, sqrt of Euler covariance trace, deg")
    k: float = Field(default=3.0, gt=0.0, description="Confidence factor of the k-sigma beamwidth rule")
    p_out_max: float = Field(default=6e-4, gt=0.0, lt=0.5, description="Outage budget for the optimizer")
    fixed_beam_deg: Optional[float] = Field(
        default=None, gt=0.0, description="Fixed-mode beamwidth, deg; mean heuristic beamwidth if omitted"
    )
    codebook_deg: Optional[List[float]] = Field(default=None, description="Selectable beamwidths, deg")
    extrapolate_peer: bool = Field(default=False, description="Extrapolate stale peer positions by velocity")
    seed: int = Field(default=0, ge=0, description="Master random seed")
    outage_trials: int = Field(default=100_000, ge=10_000, description="Monte Carlo trials for outage estimation")
    max_workers: int = Field(default=1, ge=1, description="Worker processes for sweeps")

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def scenario(cls, name: str, **overrides: Any) -> "SimConfig":
        """Preset accuracy scenario: S1 (current mobility) or S2 (next generation)."""
        presets = {"S1": (1.5, 1.5), "S2": (0.15, 0.15)}
        if name not in presets:
            raise ConfigError(f"unknown scenario {name!r}; expected one of {sorted(presets)}")
        sigma_p, sigma_gamma_deg = presets[name]
        return cls(**{"sigma_p": sigma_p, "sigma_gamma_deg": sigma_gamma_deg, **overrides})

    @property
    def position_cov(self) -> np.ndarray:
        return np.eye(3) * self.sigma_p**2 / 3.0

    @property
    def euler_cov(self) -> np.ndarray:
        return np.eye(3) * math.radians(self.sigma_gamma_deg) ** 2 / 3.0


class AppConfig(BaseModel):
    """Main application configuration."""

    environment: str = Field(default="development", description="Environment name")
    debug: bool = Field(default=False, description="Debug mode flag")
    log_level: str = Field(default="INFO", description="structlog level")
    output_dir: str = Field(default="results", description="Directory for result files")
    link: LinkConfig = Field(default_factory=LinkConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    simulation: SimConfig = Field(default_factory=SimConfig)
    trajectory: TrajectoryConfig = Field(default_factory=TrajectoryConfig)

    model_config = ConfigDict(extra="forbid")

    def to_toml(self) -> str:
        """Serialise to TOML text that from_toml() reads back unchanged."""
        return dump_toml(self.model_dump(exclude_none=True))


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {type(value).__name__} to TOML")


def _is_table_array(value: Any) -> bool:
    return isinstance(value, list) and bool(value) and all(isinstance(v, dict) for v in value)


def dump_toml(data: Dict[str, Any], prefix: str = "") -> str:
    """Minimal TOML writer for nested dicts of scalars, lists and table arrays."""
    lines: List[str] = []
    tables: List[str] = []
    for key, value in data.items():
        path = f"{prefix}.{key}" if prefix else key
        if isinstance(value, dict):
            body = dump_toml(value, path)
            tables.append(f"[{path}]\n{body}")
        elif _is_table_array(value):
            for item in value:
                tables.append(f"[[{path}]]\n{dump_toml(item, path)}")
        else:
            lines.append(f"{key} = {_toml_value(value)}")
    text = "\n".join(lines)
    if lines:
        text += "\n"
    for table in tables:
        text += "\n" + table
    return text


def _deep_merge(base: Dict[str, Any], extra: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_toml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"invalid TOML in {path}: {e}") from e


def _env_overrides() -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    if "ENVIRONMENT" in os.environ:
        overrides["environment"] = os.environ["ENVIRONMENT"]
    if "DEBUG" in os.environ:
        overrides["debug"] = os.environ["DEBUG"].lower() == "true"
    if "LOG_LEVEL" in os.environ:
        overrides["log_level"] = os.environ["LOG_LEVEL"].upper()
    if "BPC_OUTPUT_DIR" in os.environ:
        overrides["output_dir"] = os.environ["BPC_OUTPUT_DIR"]
    if "BPC_SEED" in os.environ:
        overrides["simulation"] = {"seed": int(os.environ["BPC_SEED"])}
    return overrides


class AppConfigLoader:
    """Singleton loader for application configuration."""

    _instance: Optional[AppConfig] = None

    @classmethod
    def build(
        cls,
        data: Optional[Dict[str, Any]] = None,
        calibration_path: Optional[Path] = None,
        overrides: Optional[Dict[str, Any]] = None,
        use_env: bool = True,
    ) -> AppConfig:
        """Merge defaults < data < calibration file < environment < overrides."""
        merged: Dict[str, Any] = dict(data or {})
        if calibration_path is not None:
            calibration = _read_toml(Path(calibration_path))
            unknown = set(calibration) - {"link"}
            if unknown:
                raise ConfigError(f"calibration file has unexpected sections: {sorted(unknown)}")
            merged = _deep_merge(merged, calibration)
        if use_env:
            merged = _deep_merge(merged, _env_overrides())
        if overrides:
            merged = _deep_merge(merged, overrides)
        try:
            return AppConfig.model_validate(merged)
        except ValidationError as e:
            raise ConfigError(str(e)) from e
        except ValueError as e:
            raise ConfigError(str(e)) from e

    @classmethod
    def from_toml(cls, text: str) -> AppConfig:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"invalid TOML: {e}") from e
        return cls.build(data, use_env=False)

    @classmethod
    def from_file(cls, path: Path | str) -> AppConfig:
        return cls.build(_read_toml(Path(path)), use_env=False)

    @classmethod
    def load_config(
        cls,
        config_path: Optional[Path | str] = None,
        calibration_path: Optional[Path | str] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> AppConfig:
        """Load configuration from file, calibration and environment variables."""
        if cls._instance is None:
            data = _read_toml(Path(config_path)) if config_path else {}
            calibration = calibration_path or os.getenv("BPC_CALIBRATION_FILE")
            cls._instance = cls.build(
                data,
                calibration_path=Path(calibration) if calibration else None,
                overrides=overrides,
            )
            logger.debug("Configuration loaded", config_path=str(config_path) if config_path else None)
        return cls._instance

    @classmethod
    def app_config(cls) -> AppConfig:
        """Get the current application configuration."""
        return cls.load_config()

    @classmethod
    def reset(cls) -> None:
        """Reset the configuration (useful for testing)."""
        cls._instance = None
