"""
Main entry point for the V2V beamwidth and power control simulator.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

import structlog
from dotenv import load_dotenv

load_dotenv()

from app.channel.calibration import calibrate
from app.config.app_config import AppConfig, AppConfigLoader, SimConfig
from app.errors import BpcError
from app.sim.sweep import SWEEP_AXES
from app.utils.logging import configure_logging
from app.utils.results_store import get_results_store
from app.workflows.simulation_workflow import SimulationWorkflow
from app.workflows.state import failure_kind

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_EXIT_CODES = {"input": EXIT_INPUT, "numerical": EXIT_NUMERICAL, "internal": EXIT_INTERNAL}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--calibration", help="Calibration TOML written by `calibrate`")
    common.add_argument("--out-dir", help="Output directory")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return common


def _simulation_options() -> argparse.ArgumentParser:
    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--mode", choices=["heuristic", "fixed", "optimizer"])
    sim.add_argument("--trajectory", help="Trajectory CSV; the synthetic circuit is used if omitted")
    sim.add_argument("--fixed-beam-deg", type=float)
    sim.add_argument("--scenario", choices=["S1", "S2"], help="Preset position/orientation accuracy")
    sim.add_argument("--tau-ms", type=float, help="Control-link latency, ms")
    sim.add_argument("--f-data", type=float, help="Estimate sampling rate, Hz")
    sim.add_argument("--sigma-p", type=float, help="Position error, m")
    sim.add_argument("--sigma-gamma-deg", type=float, help="Orientation error, deg")
    sim.add_argument("--k", type=float, help="Confidence factor")
    sim.add_argument("--fusion-mode", choices=["sampled", "full_ekf"])
    sim.add_argument("--workers", type=int, help="Worker processes for sweeps")
    return sim


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="v2v-bpc", description="Sensor-aided beamwidth and power control simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    common, sim = _common_options(), _simulation_options()

    run_cmd = sub.add_parser("run", parents=[common, sim], help="Simulate once and write results")
    run_cmd.add_argument("--estimate-outage", action="store_true", help="Also run the Monte Carlo outage estimate")
    run_cmd.add_argument("--outage-trials", type=int)

    sweep_cmd = sub.add_parser("sweep", parents=[common, sim], help="One run per value of a parameter")
    sweep_cmd.add_argument("--axis", required=True, choices=sorted(SWEEP_AXES))
    sweep_cmd.add_argument("--values", type=float, nargs="*", default=[], help="Values (tau in ms)")

    sub.add_parser("calibrate", parents=[common], help="Calibrate the antenna gain constant")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """CLI flags as a nested config overlay; unset flags are left out."""
    simulation: Dict[str, Any] = {}
    scenario = getattr(args, "scenario", None)
    if scenario:
        preset = SimConfig.scenario(scenario)
        simulation.update(sigma_p=preset.sigma_p, sigma_gamma_deg=preset.sigma_gamma_deg)
    flags = {
        "seed": "seed",
        "mode": "mode",
        "fixed_beam_deg": "fixed_beam_deg",
        "f_data": "f_data",
        "sigma_p": "sigma_p",
        "sigma_gamma_deg": "sigma_gamma_deg",
        "k": "k",
        "fusion_mode": "fusion_mode",
        "workers": "max_workers",
        "outage_trials": "outage_trials",
    }
    for flag, field in flags.items():
        value = getattr(args, flag, None)
        if value is not None:
            simulation[field] = value
    if getattr(args, "tau_ms", None) is not None:
        simulation["latency_tau"] = args.tau_ms / 1000.0

    overrides: Dict[str, Any] = {}
    if simulation:
        overrides["simulation"] = simulation
    if getattr(args, "trajectory", None):
        overrides["trajectory"] = {"path": args.trajectory}
    if args.out_dir:
        overrides["output_dir"] = args.out_dir
    if args.log_level:
        overrides["log_level"] = args.log_level.upper()
    return overrides


def load_app_config(args: argparse.Namespace) -> AppConfig:
    AppConfigLoader.reset()
    return AppConfigLoader.load_config(args.config, args.calibration, _overrides(args))


def _print_flat(values: Dict[str, object]) -> None:
    for key, value in values.items():
        print(f"{key} = {value}")


def cmd_run(config: AppConfig, estimate: bool = False) -> int:
    response = SimulationWorkflow(config).run(estimate_outage=estimate)
    if not response["success"]:
        print(f"error: {response['error']}", file=sys.stderr)
        return _EXIT_CODES[response["failure"]]
    _print_flat(response["summary"].to_flat())
    if "outage" in response:
        _print_flat({f"mc_{k}": v for k, v in response["outage"].model_dump().items()})
    return EXIT_OK


def cmd_sweep(config: AppConfig, axis: str, values: List[float]) -> int:
    response = SimulationWorkflow(config).sweep(axis, values)
    if not response["success"]:
        print(f"error: {response['error']}", file=sys.stderr)
        return _EXIT_CODES[response["failure"]]
    for entry in response["sweep"]:
        s = entry.summary
        print(f"{axis}={entry.value:g}: outage_rate = {s.outage_rate:.3e}, ptx_mean = {s.ptx_mean:.2f} dBm")
    return EXIT_OK


def cmd_calibrate(config: AppConfig) -> int:
    report = calibrate(config.link)
    _print_flat(report.to_flat())
    if not report.passed or abs(report.anchor_residual_db) > report.tolerance_db:
        print("error: second anchor outside tolerance", file=sys.stderr)
        return EXIT_NUMERICAL
    get_results_store(config.output_dir).write_calibration(report)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_app_config(args)
    except BpcError as e:
        configure_logging("INFO")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    configure_logging("DEBUG" if config.debug else config.log_level)
    logger.info("Starting", command=args.command, environment=config.environment)

    try:
        if args.command == "run":
            return cmd_run(config, estimate=args.estimate_outage)
        if args.command == "sweep":
            return cmd_sweep(config, args.axis, args.values)
        return cmd_calibrate(config)
    except BpcError as e:
        print(f"error: {e}", file=sys.stderr)
        return _EXIT_CODES[failure_kind(e)]


if __name__ == "__main__":
    sys.exit(main())
