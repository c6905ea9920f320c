"""
Shared fixtures: seeded RNG, default and short-route configs, and a clean
configuration singleton per test.
"""

import numpy as np
import pytest

from app.config import AppConfig, AppConfigLoader, SegmentConfig, TrajectoryConfig
from app.sim.trajectory import build_trajectory

ENV_VARS = ["ENVIRONMENT", "DEBUG", "LOG_LEVEL", "BPC_OUTPUT_DIR", "BPC_SEED", "BPC_CALIBRATION_FILE"]


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    AppConfigLoader.reset()
    yield
    AppConfigLoader.reset()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def app_config() -> AppConfig:
    return AppConfig()


def short_route() -> TrajectoryConfig:
    """Accelerate, sweep a gentle bend at speed, brake: about 24 s of driving."""
    return TrajectoryConfig(
        initial_speed=3.0,
        segments=[
            SegmentConfig(kind="straight", length=150.0, speed_end=25.0),
            SegmentConfig(kind="arc", radius=80.0, angle_deg=45.0),
            SegmentConfig(kind="straight", length=150.0, speed_end=3.0),
        ],
        imu_noise=False,
    )


@pytest.fixture
def short_config(tmp_path) -> AppConfig:
    return AppConfig(trajectory=short_route(), output_dir=str(tmp_path / "out"))


@pytest.fixture
def short_trajectory(short_config):
    return build_trajectory(short_config)


def with_sim(config: AppConfig, **updates) -> AppConfig:
    """Copy of config with validated simulation overrides."""
    data = {**config.simulation.model_dump(), **updates}
    return config.model_copy(update={"simulation": type(config.simulation).model_validate(data)})
