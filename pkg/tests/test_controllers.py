import math

import numpy as np
import pytest

from app.bpc import bpc_step
from app.config import AppConfig
from app.controllers import (
    ControllerRegistry,
    FixedController,
    HeuristicController,
    OptimizerController,
    StepContext,
    create_controller,
)
from app.controllers.base_controller import FOLLOW_DEFAULT_POINTING, LEAD_DEFAULT_POINTING
from app.errors import ConfigError
from app.fusion import quat_cov_from_euler_cov
from app.geometry import IDENTITY
from app.models import Beamwidth, PeerEstimate
from tests.conftest import with_sim


def estimate(p, t=0.0, v=(10.0, 0.0, 0.0), var_p=0.25) -> PeerEstimate:
    C_gamma = math.radians(0.5) ** 2 * np.eye(3)
    return PeerEstimate(
        p_hat=np.asarray(p, dtype=float),
        C_p_hat=var_p * np.eye(3),
        q_hat=IDENTITY,
        C_q_hat=quat_cov_from_euler_cov(IDENTITY, C_gamma),
        timestamp=t,
        v_hat=np.asarray(v, dtype=float),
    )


def context(k=5, delivered=True, lag_t=0.0) -> StepContext:
    own1, own2 = estimate([30.0, 0.0, 0.0], t=1.0), estimate([0.0, 0.0, 0.0], t=1.0)
    stale1 = estimate([30.0 - 10 * lag_t, 0.0, 0.0], t=1.0 - lag_t)
    stale2 = estimate([-10 * lag_t, 0.0, 0.0], t=1.0 - lag_t)
    return StepContext(
        k=k,
        t=1.0,
        own1=own1,
        own2=own2,
        stale1=stale1 if delivered else None,
        stale2=stale2 if delivered else None,
        p1=np.array([30.0, 0.0, 0.0]),
        q1=IDENTITY,
        p2=np.zeros(3),
        q2=IDENTITY,
        C_gamma1=math.radians(0.5) ** 2 * np.eye(3),
        C_gamma2=math.radians(0.5) ** 2 * np.eye(3),
    )


class TestRegistry:
    def test_all_modes_registered(self):
        names = [d.name for d in ControllerRegistry.get_all_controllers()]
        assert names == ["heuristic", "fixed", "optimizer"]

    def test_only_optimizer_uses_truth(self):
        assert ControllerRegistry.get_optimizer().uses_truth
        assert not ControllerRegistry.get_heuristic().uses_truth

    def test_find_unknown_mode(self):
        assert ControllerRegistry.find("oracle") is None

    def test_factory_builds_each_mode(self):
        config = with_sim(AppConfig(), fixed_beam_deg=10.0)
        assert isinstance(create_controller("heuristic", config), HeuristicController)
        assert isinstance(create_controller("fixed", config), FixedController)
        assert isinstance(create_controller("optimizer", config), OptimizerController)

    def test_factory_rejects_unknown_mode(self, app_config):
        with pytest.raises(ConfigError, match="unknown mode"):
            create_controller("oracle", app_config)


class TestHeuristic:
    def test_warm_up_before_first_exchange(self, app_config):
        decision = HeuristicController(app_config).step(context(delivered=False))
        link = app_config.link
        assert decision.w1 == Beamwidth(link.omega_max, link.omega_max)
        assert decision.pointing1 == LEAD_DEFAULT_POINTING
        assert decision.pointing2 == FOLLOW_DEFAULT_POINTING

    def test_decision_matches_bpc_step(self, app_config):
        ctx = context()
        decision = HeuristicController(app_config).step(ctx)
        expected = bpc_step(ctx.own1, ctx.stale2, app_config.link, app_config.simulation.k)
        assert decision.w1 == expected.beamwidth
        assert decision.ptx == pytest.approx(expected.ptx)
        assert decision.pointing1.azimuth == pytest.approx(math.pi)

    def test_extrapolation_compensates_stale_peer(self, app_config):
        ctx = context(lag_t=0.5)
        plain = HeuristicController(app_config).step(ctx)
        ahead = HeuristicController(with_sim(app_config, extrapolate_peer=True)).step(ctx)
        exact = HeuristicController(app_config).step(context(lag_t=0.0))
        assert ahead.ptx == pytest.approx(exact.ptx)
        assert plain.ptx != pytest.approx(exact.ptx)


class TestFixed:
    def test_requires_a_beam(self, app_config):
        with pytest.raises(ConfigError, match="fixed_beam_deg"):
            FixedController(app_config)

    def test_same_beam_at_both_ends(self, app_config):
        decision = FixedController(with_sim(app_config, fixed_beam_deg=13.0)).step(context())
        assert decision.w1 == decision.w2 == Beamwidth.from_degrees(13.0)
        assert not decision.eirp_clipped


class TestOptimizer:
    def test_no_warm_up(self, app_config):
        decision = OptimizerController(app_config).step(context(delivered=False))
        assert decision.w1.az < app_config.link.omega_max
        assert decision.feasible

    def test_solution_cached_per_step(self, app_config):
        controller = OptimizerController(app_config)
        first = controller.solve(context(k=3))
        assert controller.solve(context(k=3)) is first
        assert controller.solve(context(k=4)) is not first

    def test_problem_uses_true_geometry(self, app_config):
        prob = OptimizerController(app_config).problem(context())
        assert prob.p1 == pytest.approx([30.0, 0.0, 0.0])
        assert prob.p_out_max == app_config.simulation.p_out_max
