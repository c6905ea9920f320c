"""
Simulation module: trajectories, vehicle pairing, noisy estimates, the run
loop and its metrics.
"""

from .engine import estimate_outage, fair_fixed_beamwidth, resolve_fixed_beam, run, run_many
from .estimates import EstimateStream, ekf_estimates, sampled_estimates, vehicle_estimates
from .metrics import metrics, snr_cdf
from .pairing import pair_vehicles, staleness_steps
from .sweep import SWEEP_AXES, run_sweep, sweep_configs
from .trajectory import (
    CSV_COLUMNS,
    build_trajectory,
    generate_trajectory,
    load_trajectory,
    resample_trajectory,
    save_trajectory,
)

__all__ = [
    "CSV_COLUMNS",
    "SWEEP_AXES",
    "EstimateStream",
    "build_trajectory",
    "ekf_estimates",
    "estimate_outage",
    "fair_fixed_beamwidth",
    "generate_trajectory",
    "load_trajectory",
    "metrics",
    "pair_vehicles",
    "resample_trajectory",
    "resolve_fixed_beam",
    "run",
    "run_many",
    "run_sweep",
    "sampled_estimates",
    "save_trajectory",
    "snr_cdf",
    "staleness_steps",
    "sweep_configs",
    "vehicle_estimates",
]
