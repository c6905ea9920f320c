"""
Config module for the BPC simulator.
"""

from .app_config import (
    AppConfig,
    AppConfigLoader,
    LinkConfig,
    NoiseConfig,
    SegmentConfig,
    SimConfig,
    TrajectoryConfig,
    default_circuit,
    dump_toml,
)

__all__ = [
    "AppConfig",
    "AppConfigLoader",
    "LinkConfig",
    "NoiseConfig",
    "SegmentConfig",
    "SimConfig",
    "TrajectoryConfig",
    "default_circuit",
    "dump_toml",
]
