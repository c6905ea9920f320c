"""
One-parameter sweeps over the simulation protocol.
"""

from typing import Callable, Dict, List, Optional, Sequence

import structlog

from app.config.app_config import AppConfig
from app.errors import ConfigError
from app.models.response_models import SweepEntry
from app.models.trajectory_models import Trajectory
from app.sim.engine import run_many
from app.sim.metrics import metrics

logger = structlog.get_logger(__name__)

# axis name -> (SimConfig field, conversion from the CLI value)
SWEEP_AXES: Dict[str, tuple[str, Callable[[float], float]]] = {
    "tau": ("latency_tau", lambda ms: ms / 1000.0),
    "f_data": ("f_data", float),
    "sigma_p": ("sigma_p", float),
    "sigma_gamma": ("sigma_gamma_deg", float),
    "k": ("k", float),
}


def sweep_configs(config: AppConfig, axis: str, values: Sequence[float]) -> List[AppConfig]:
    """Copies of config with one simulation parameter set to each value."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {sorted(SWEEP_AXES)}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    field, convert = SWEEP_AXES[axis]
    configs = []
    for value in values:
        data = config.simulation.model_dump()
        data[field] = convert(value)
        try:
            simulation = type(config.simulation).model_validate(data)
        except ValueError as e:
            raise ConfigError(f"invalid {axis} value {value}: {e}") from e
        configs.append(config.model_copy(update={"simulation": simulation}))
    return configs


def run_sweep(
    config: AppConfig,
    axis: str,
    values: Sequence[float],
    trajectory: Optional[Trajectory] = None,
    max_workers: Optional[int] = None,
) -> List[SweepEntry]:
    """Run every sweep value and summarise each run.

    The trajectory is shared across values except on the f_data axis, where
    each run samples the route at its own rate.
    """
    configs = sweep_configs(config, axis, values)
    shared = None if axis == "f_data" else trajectory
    workers = config.simulation.max_workers if max_workers is None else max_workers
    logger.info("Sweep started", axis=axis, values=list(values), max_workers=workers)
    results = run_many(configs, shared, max_workers=workers)
    return [
        SweepEntry(axis=axis, value=float(value), summary=metrics(result))
        for value, result in zip(values, results)
    ]
