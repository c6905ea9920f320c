"""
Simulation engine: the per-step decision loop, truth evaluation, Monte Carlo
outage estimation and parallel runs.

Random streams are spawned from the master seed: one per vehicle for the
estimate errors, one for trajectory noise and one for Monte Carlo trials.
Results do not depend on how runs are scheduled.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from app.channel.link_budget import max_gain, max_gain_db, pattern_gain, snr_db
from app.config.app_config import AppConfig
from app.controllers.base_controller import StepContext
from app.controllers.controller_factory import create_controller
from app.controllers.controller_types import FIXED_MODE, HEURISTIC_MODE
from app.errors import ConfigError, NumericalFailureError
from app.fusion.covariance import quat_cov_from_euler_cov
from app.geometry.frames import los_angles, relative_position
from app.geometry.quaternion import wrap_angle
from app.models.models import Beamwidth, PeerEstimate, PointingError
from app.models.response_models import LinkDecision, OutageEstimate, RunResult
from app.models.trajectory_models import Trajectory, VehiclePair
from app.sim.estimates import EstimateStream, perturb_orientation, vehicle_estimates
from app.sim.pairing import pair_vehicles, staleness_steps
from app.sim.trajectory import build_trajectory

logger = structlog.get_logger(__name__)

EIRP_TOLERANCE = 1e-9
HALF_POWER = 0.5


def _streams(seed: int) -> List[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(4)]


def _with_sim(config: AppConfig, **updates) -> AppConfig:
    return config.model_copy(update={"simulation": config.simulation.model_copy(update=updates)})


def fair_fixed_beamwidth(result: RunResult) -> float:
    """Mean beamwidth over both ends and both axes, in degrees."""
    return float(np.degrees(np.mean(np.concatenate([result.w1.ravel(), result.w2.ravel()]))))


def resolve_fixed_beam(config: AppConfig, traj: Trajectory) -> AppConfig:
    """Fill in the fixed-mode beamwidth from a heuristic run when it is not configured."""
    sim = config.simulation
    if sim.mode != FIXED_MODE or sim.fixed_beam_deg is not None:
        return config
    heuristic = run(_with_sim(config, mode=HEURISTIC_MODE), traj)
    beam = fair_fixed_beamwidth(heuristic)
    logger.info("Fixed beamwidth taken from heuristic run", fixed_beam_deg=beam)
    return _with_sim(config, fixed_beam_deg=beam)


def _true_pointing(pair: VehiclePair) -> Tuple[np.ndarray, np.ndarray]:
    lead, follow = pair.lead, pair.follow
    to_follow = los_angles(relative_position(lead.p, follow.p, lead.q))
    to_lead = los_angles(relative_position(follow.p, lead.p, follow.q))
    return np.column_stack(to_follow), np.column_stack(to_lead)


def _evaluate(
    config: AppConfig,
    w1: np.ndarray,
    w2: np.ndarray,
    ptx: np.ndarray,
    pointing1: np.ndarray,
    pointing2: np.ndarray,
    true1: np.ndarray,
    true2: np.ndarray,
    d: np.ndarray,
):
    """Pointing errors, end gains and SNR of a batch of decisions against the truth."""
    link = config.link
    err1 = wrap_angle(pointing1 - true1)
    err2 = wrap_angle(pointing2 - true2)
    beam1, beam2 = Beamwidth(w1[:, 0], w1[:, 1]), Beamwidth(w2[:, 0], w2[:, 1])
    shape1 = np.asarray(pattern_gain(PointingError(err1[:, 0], err1[:, 1]), beam1))
    shape2 = np.asarray(pattern_gain(PointingError(err2[:, 0], err2[:, 1]), beam2))
    g1 = np.asarray(max_gain(beam1, link)) * shape1
    g2 = np.asarray(max_gain(beam2, link)) * shape2
    snr = np.asarray(snr_db(ptx, g1, g2, d, link))
    return err1, err2, g1, g2, snr, shape1, shape2


def _decide(controller, ctx: StepContext) -> LinkDecision:
    try:
        return controller.step(ctx)
    except NumericalFailureError as e:
        raise NumericalFailureError(str(e), step=ctx.k) from e


def _estimates(config: AppConfig, pair: VehiclePair, traj: Trajectory) -> Tuple[EstimateStream, EstimateStream]:
    sim = config.simulation
    rng1, rng2 = _streams(sim.seed)[:2]
    kwargs = dict(noise=config.noise, C_p=sim.position_cov, C_gamma=sim.euler_cov, gps_rate=sim.gps_rate)
    est1 = vehicle_estimates(sim.fusion_mode, pair.lead, traj, 0.0, rng=rng1, **kwargs)
    est2 = vehicle_estimates(sim.fusion_mode, pair.follow, traj, sim.delta_t_gap, rng=rng2, **kwargs)
    return est1, est2


def run(config: AppConfig, traj: Optional[Trajectory] = None) -> RunResult:
    """Simulate the link over the trajectory in the configured mode."""
    sim, link = config.simulation, config.link
    traj = build_trajectory(config) if traj is None else traj
    config = resolve_fixed_beam(config, traj)
    pair = pair_vehicles(traj, sim.delta_t_gap)
    est1, est2 = _estimates(config, pair, traj)
    controller = create_controller(sim.mode, config)
    lag = staleness_steps(sim.latency_tau, sim.f_data)
    n = len(pair)
    logger.info("Run started", mode=sim.mode, steps=n, lag_steps=lag, fusion_mode=sim.fusion_mode)

    cg1 = np.array([est1.euler_cov(k) for k in range(n)])
    cg2 = np.array([est2.euler_cov(k) for k in range(n)])
    w1, w2 = np.zeros((n, 2)), np.zeros((n, 2))
    pointing1, pointing2 = np.zeros((n, 2)), np.zeros((n, 2))
    ptx = np.zeros(n)
    clipped = np.zeros(n, dtype=bool)
    infeasible = 0

    for k in range(n):
        ctx = StepContext(
            k=k,
            t=float(pair.t[k]),
            own1=est1.at(k),
            own2=est2.at(k),
            stale1=est1.at(k - lag) if k >= lag else None,
            stale2=est2.at(k - lag) if k >= lag else None,
            p1=pair.lead.p[k],
            q1=pair.lead.q[k],
            p2=pair.follow.p[k],
            q2=pair.follow.q[k],
            C_gamma1=cg1[k],
            C_gamma2=cg2[k],
        )
        decision = _decide(controller, ctx)
        w1[k], w2[k] = decision.w1, decision.w2
        pointing1[k], pointing2[k] = decision.pointing1, decision.pointing2
        ptx[k] = decision.ptx
        clipped[k] = decision.eirp_clipped
        infeasible += not decision.feasible

    eirp = ptx + np.asarray(max_gain_db(Beamwidth(w1[:, 0], w1[:, 1]), link))
    over = np.flatnonzero(eirp > link.eirp_max + EIRP_TOLERANCE)
    if over.size:
        k = int(over[0])
        raise NumericalFailureError(f"EIRP {eirp[k]:.3f} dBm exceeds the {link.eirp_max} dBm limit", step=k)

    true1, true2 = _true_pointing(pair)
    d = pair.distance
    err1, err2, g1, g2, snr, _, _ = _evaluate(config, w1, w2, ptx, pointing1, pointing2, true1, true2, d)
    outage = snr < link.snr_min

    if infeasible:
        logger.warning("Optimizer could not meet the budget at some steps", steps=infeasible)
    logger.info(
        "Run complete",
        mode=sim.mode,
        steps=n,
        outage_rate=float(outage.mean()),
        ptx_mean=float(ptx.mean()),
        eirp_clipped=int(clipped.sum()),
    )
    return RunResult(
        mode=sim.mode,
        snr_min=link.snr_min,
        t=pair.t,
        d=d,
        w1=w1,
        w2=w2,
        ptx=ptx,
        snr=snr,
        outage=outage,
        err1=err1,
        err2=err2,
        g1=g1,
        g2=g2,
        eirp_clipped=clipped,
        trace_cp=np.trace(est1.C_p, axis1=1, axis2=2),
        trace_cgamma=np.trace(cg1, axis1=1, axis2=2),
    )


def _binomial(count: int, n: int) -> Tuple[float, float]:
    p = count / n
    return p, math.sqrt(p * (1.0 - p) / n)


def estimate_outage(
    config: AppConfig, traj: Optional[Trajectory] = None, n_trials: Optional[int] = None
) -> OutageEstimate:
    """Monte Carlo SNR outage and misalignment over independent error draws.

    Each trial picks a step at random and draws fresh errors for both
    vehicles around the true states; the exchange is ideal (no latency).
    """
    sim, link = config.simulation, config.link
    n_trials = sim.outage_trials if n_trials is None else n_trials
    if n_trials < 10_000:
        raise ConfigError(f"n_trials must be at least 10000, got {n_trials}")
    traj = build_trajectory(config) if traj is None else traj
    config = resolve_fixed_beam(config, traj)
    pair = pair_vehicles(traj, sim.delta_t_gap)
    controller = create_controller(sim.mode, config)
    rng = _streams(sim.seed)[3]

    C_p, C_gamma = sim.position_cov, sim.euler_cov
    steps = rng.integers(0, len(pair), size=n_trials)
    dp1 = rng.multivariate_normal(np.zeros(3), C_p, size=n_trials)
    dp2 = rng.multivariate_normal(np.zeros(3), C_p, size=n_trials)
    q1_hat = perturb_orientation(pair.lead.q[steps], C_gamma, rng)
    q2_hat = perturb_orientation(pair.follow.q[steps], C_gamma, rng)

    w1, w2 = np.zeros((n_trials, 2)), np.zeros((n_trials, 2))
    pointing1, pointing2 = np.zeros((n_trials, 2)), np.zeros((n_trials, 2))
    ptx = np.zeros(n_trials)
    for i, k in enumerate(steps):
        own1 = PeerEstimate(
            p_hat=pair.lead.p[k] + dp1[i],
            C_p_hat=C_p,
            q_hat=q1_hat[i],
            C_q_hat=quat_cov_from_euler_cov(q1_hat[i], C_gamma),
            timestamp=float(pair.t[k]),
        )
        own2 = PeerEstimate(
            p_hat=pair.follow.p[k] + dp2[i],
            C_p_hat=C_p,
            q_hat=q2_hat[i],
            C_q_hat=quat_cov_from_euler_cov(q2_hat[i], C_gamma),
            timestamp=float(pair.t[k]),
        )
        ctx = StepContext(
            k=int(k),
            t=float(pair.t[k]),
            own1=own1,
            own2=own2,
            stale1=own1,
            stale2=own2,
            p1=pair.lead.p[k],
            q1=pair.lead.q[k],
            p2=pair.follow.p[k],
            q2=pair.follow.q[k],
            C_gamma1=C_gamma,
            C_gamma2=C_gamma,
        )
        decision = _decide(controller, ctx)
        w1[i], w2[i] = decision.w1, decision.w2
        pointing1[i], pointing2[i] = decision.pointing1, decision.pointing2
        ptx[i] = decision.ptx

    true1, true2 = _true_pointing(pair)
    *_, snr, shape1, shape2 = _evaluate(
        config, w1, w2, ptx, pointing1, pointing2, true1[steps], true2[steps], pair.distance[steps]
    )
    outage, outage_se = _binomial(int(np.count_nonzero(snr < link.snr_min)), n_trials)
    missed1, missed2 = shape1 < HALF_POWER, shape2 < HALF_POWER
    mis, mis_se = _binomial(int(np.count_nonzero(missed1 | missed2)), n_trials)
    mis_tx, mis_tx_se = _binomial(int(np.count_nonzero(missed1)), n_trials)
    mis_rx, mis_rx_se = _binomial(int(np.count_nonzero(missed2)), n_trials)
    logger.info("Outage estimated", mode=sim.mode, n_trials=n_trials, outage=outage, misalignment=mis)
    return OutageEstimate(
        n_trials=n_trials,
        outage=outage,
        outage_se=outage_se,
        misalignment=mis,
        misalignment_se=mis_se,
        misalignment_tx=mis_tx,
        misalignment_tx_se=mis_tx_se,
        misalignment_rx=mis_rx,
        misalignment_rx_se=mis_rx_se,
    )


def _run_one(args: Tuple[AppConfig, Optional[Trajectory]]) -> RunResult:
    config, traj = args
    return run(config, traj)


def run_many(
    configs: Sequence[AppConfig], trajectory: Optional[Trajectory] = None, max_workers: int = 1
) -> List[RunResult]:
    """Independent runs, in parallel when max_workers > 1; results keep the input order."""
    jobs = [(config, trajectory) for config in configs]
    if max_workers <= 1 or len(jobs) <= 1:
        return [_run_one(job) for job in jobs]
    logger.info("Running in parallel", runs=len(jobs), max_workers=max_workers)
    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(_run_one, jobs))
