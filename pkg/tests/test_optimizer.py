import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import erfc

from app.config import LinkConfig
from app.errors import NonPsdCovarianceError
from app.geometry import IDENTITY, euler_to_quat
from app.models import Beamwidth, LosPlaneCovariance, OptProblem
from app.optimizer import (
    circumscribing_beam,
    circumscribing_semi_axes,
    disk_tail,
    ellipse_tail,
    fit_footprint_scale,
    fit_principal_scale,
    los_plane_side,
    misalignment_probability,
    optimize,
    orientation_cov_to_los,
    p_beam_cover,
    p_mis_approx,
    p_mis_total,
    per_side_target,
    project_position_cov,
    required_ptx_worstcase,
)
from app.optimizer.projection import los_geometry

AHEAD = np.array([50.0, 0.0, 0.0])


def problem(sigma_p: float = 0.5, sigma_gamma_deg: float = 1.0, p_out_max: float = 6e-4) -> OptProblem:
    C_gamma = math.radians(sigma_gamma_deg) ** 2 * np.eye(3)
    return OptProblem(
        p1=AHEAD,
        q1=IDENTITY,
        p2=np.zeros(3),
        q2=IDENTITY,
        C_p1=sigma_p**2 * np.eye(3),
        C_p2=sigma_p**2 * np.eye(3),
        C_gamma1=C_gamma,
        C_gamma2=C_gamma,
        p_out_max=p_out_max,
        link=LinkConfig(),
    )


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


ROTATED = _rotation(0.6) @ np.diag([4.0, 0.25]) @ _rotation(0.6).T


def rotated_problem() -> OptProblem:
    """Position errors tilted in the plane across the LOS."""
    tilt = np.eye(3)
    tilt[1:, 1:] = _rotation(0.6)
    C_p = tilt @ np.diag([0.01, 1.0, 0.0625]) @ tilt.T
    C_gamma = math.radians(0.3) ** 2 * np.eye(3)
    return OptProblem(
        p1=AHEAD,
        q1=IDENTITY,
        p2=np.zeros(3),
        q2=IDENTITY,
        C_p1=C_p,
        C_p2=C_p,
        C_gamma1=C_gamma,
        C_gamma2=C_gamma,
        p_out_max=6e-4,
        link=LinkConfig(),
    )


class TestProjection:
    def test_position_covariance_drops_los_component(self):
        q_los, _ = los_geometry(IDENTITY, AHEAD)
        c = project_position_cov(np.diag([1.0, 2.0, 3.0]), IDENTITY, q_los)
        assert_allclose(c.C, np.diag([2.0, 3.0]), atol=1e-12)

    def test_projection_follows_own_heading(self):
        q = euler_to_quat((0.0, 0.0, math.pi / 2))
        dp = np.array([0.0, 50.0, 0.0])
        q_los, d = los_geometry(q, dp)
        c = project_position_cov(np.diag([1.0, 2.0, 3.0]), q, q_los)
        assert d == pytest.approx(50.0)
        assert_allclose(c.C, np.diag([1.0, 3.0]), atol=1e-12)

    def test_yaw_error_moves_peer_sideways(self):
        var = math.radians(1.0) ** 2
        C = orientation_cov_to_los(np.diag([0.0, 0.0, var]), IDENTITY, AHEAD)
        assert_allclose(C, np.diag([var, 0.0]), atol=1e-15)

    def test_pitch_error_moves_peer_vertically(self):
        var = math.radians(1.0) ** 2
        C = orientation_cov_to_los(np.diag([0.0, var, 0.0]), IDENTITY, AHEAD)
        assert_allclose(C, np.diag([0.0, var]), atol=1e-15)

    def test_roll_about_los_has_no_effect(self):
        C = orientation_cov_to_los(np.diag([1e-3, 0.0, 0.0]), IDENTITY, AHEAD)
        assert_allclose(C, np.zeros((2, 2)), atol=1e-15)

    def test_side_combines_positions_and_scaled_orientation(self):
        var = math.radians(0.5) ** 2
        c, d = los_plane_side(np.zeros(3), IDENTITY, AHEAD, 0.25 * np.eye(3), 0.25 * np.eye(3), np.diag([0, 0, var]))
        assert d == pytest.approx(50.0)
        assert_allclose(c.C, np.diag([0.5 + d * d * var, 0.5]), rtol=1e-9)

    def test_rejects_bad_covariance(self):
        with pytest.raises(NonPsdCovarianceError):
            orientation_cov_to_los(-np.eye(3), IDENTITY, AHEAD)


class TestMisalignment:
    def test_isotropic_tail_closed_form(self):
        sigma2 = 0.2
        assert disk_tail(sigma2 * np.eye(2)) == pytest.approx(math.exp(-1.0 / (2 * sigma2)), rel=1e-8)

    def test_rank_one_tail(self):
        sigma2 = 0.3
        assert disk_tail(np.diag([sigma2, 0.0])) == pytest.approx(erfc(1.0 / math.sqrt(2 * sigma2)), rel=1e-12)

    def test_zero_covariance_never_misaligns(self):
        assert disk_tail(np.zeros((2, 2))) == 0.0

    def test_tail_decreases_with_beamwidth(self):
        C = LosPlaneCovariance(C=np.diag([1.0, 0.5]))
        narrow = misalignment_probability(Beamwidth.from_degrees(5.0), C, 50.0)
        wide = misalignment_probability(Beamwidth.from_degrees(15.0), C, 50.0)
        assert 0.0 <= wide < narrow <= 1.0

    def test_footprint_matches_isotropic_formula(self):
        sigma2, d = 1.0, 50.0
        w = Beamwidth.from_degrees(6.0)
        a = d * math.tan(0.5 * w.az)
        p = misalignment_probability(w, LosPlaneCovariance(C=sigma2 * np.eye(2)), d)
        assert p == pytest.approx(math.exp(-a * a / (2 * sigma2)), rel=1e-8)

    def test_rejects_non_positive_distance(self):
        with pytest.raises(ValueError, match="distance"):
            misalignment_probability(Beamwidth.from_degrees(5.0), LosPlaneCovariance(C=np.eye(2)), 0.0)

    def test_union_rules(self):
        target = per_side_target(6e-4)
        assert p_mis_total(target, target) == pytest.approx(6e-4, rel=1e-12)
        assert p_mis_approx(1e-3, 2e-3) == pytest.approx(3e-3)
        assert p_mis_total(1e-3, 2e-3) < p_mis_approx(1e-3, 2e-3)


def random_instance(rng: np.random.Generator, d: float = 40.0):
    """Anisotropic covariance with an axis-aligned footprint of 1.2 to 2.5 sigma per axis."""
    A = rng.normal(size=(2, 2))
    C = A @ A.T + 0.05 * np.eye(2)
    a, b = rng.uniform(1.2, 2.5, size=2) * np.sqrt(np.diag(C))
    return C, a, b, Beamwidth(2 * math.atan(a / d), 2 * math.atan(b / d)), d


def monte_carlo_cover(rng: np.random.Generator, C: np.ndarray, a: float, b: float, n: int, chunk: int = 1_000_000) -> float:
    inside = 0
    for size in [chunk] * (n // chunk) + ([n % chunk] if n % chunk else []):
        x = rng.multivariate_normal(np.zeros(2), C, size=size)
        inside += int(np.count_nonzero((x[:, 0] / a) ** 2 + (x[:, 1] / b) ** 2 <= 1.0))
    return inside / n


class TestMisalignmentOracle:
    @pytest.mark.parametrize("seed", range(10))
    def test_cover_matches_monte_carlo(self, seed):
        rng = np.random.default_rng(seed)
        C, a, b, w, d = random_instance(rng)
        p = p_beam_cover(w, LosPlaneCovariance(C=C), d)
        n = 1_000_000
        se = math.sqrt(p * (1.0 - p) / n)
        assert abs(monte_carlo_cover(rng, C, a, b, n) - p) <= 4 * se

    def test_disk_tail_matches_monte_carlo(self, rng):
        C = np.array([[0.3, 0.12], [0.12, 0.08]])
        n = 1_000_000
        x = rng.multivariate_normal(np.zeros(2), C, size=n)
        p = disk_tail(C)
        se = math.sqrt(p * (1.0 - p) / n)
        assert abs(np.mean(np.sum(x * x, axis=1) > 1.0) - p) <= 4 * se

    @pytest.mark.slow
    def test_cover_matches_monte_carlo_on_fifty_instances(self):
        rng = np.random.default_rng(2024)
        n = 10_000_000
        z = []
        for _ in range(50):
            C, a, b, w, d = random_instance(rng)
            p = p_beam_cover(w, LosPlaneCovariance(C=C), d)
            z.append((monte_carlo_cover(rng, C, a, b, n) - p) / math.sqrt(p * (1.0 - p) / n))
        z = np.abs(np.asarray(z))
        assert np.all(z <= 4.5)
        assert np.count_nonzero(z > 3.0) <= 3


class TestSolver:
    def test_principal_scale_closed_form(self):
        target = 3e-4
        s, tail = fit_principal_scale(ROTATED, target)
        assert s == pytest.approx(math.sqrt(-2.0 * math.log(target)), rel=1e-12)
        assert tail == pytest.approx(target, abs=1e-9)

    def test_circumscribed_footprint_overcovers_rotated_covariance(self):
        target = 3e-4
        s, _ = fit_principal_scale(ROTATED, target)
        hx, hz = circumscribing_semi_axes(ROTATED, s)
        assert ellipse_tail(ROTATED, np.diag([1.0 / hx, 1.0 / hz])) < 0.5 * target

    def test_footprint_scale_meets_target_exactly(self):
        target = 3e-4
        s, _ = fit_principal_scale(ROTATED, target)
        hx, hz = circumscribing_semi_axes(ROTATED, s)
        c, tail, iterations = fit_footprint_scale(ROTATED, hx, hz, target)
        assert c < 1.0
        assert iterations <= 60
        assert abs(tail - target) <= 1e-6
        assert ellipse_tail(ROTATED, np.diag([1.0 / (c * hx), 1.0 / (c * hz)])) == pytest.approx(tail, abs=1e-9)

    def test_footprint_scale_for_isotropic_covariance_stays_put(self):
        target = 3e-4
        s, _ = fit_principal_scale(np.eye(2), target)
        hx, hz = circumscribing_semi_axes(np.eye(2), s)
        c, tail, _ = fit_footprint_scale(np.eye(2), hx, hz, target)
        assert c == pytest.approx(1.0, abs=1e-6)
        assert abs(tail - target) <= 1e-6

    def test_circumscribing_beam_diagonal(self):
        d, s = 50.0, 3.0
        beam, truncated = circumscribing_beam(np.diag([4.0, 1.0]), s, d, math.radians(0.1), math.radians(120.0))
        assert not truncated
        assert beam.az == pytest.approx(2 * math.atan(s * 2.0 / d))
        assert beam.el == pytest.approx(2 * math.atan(s * 1.0 / d))

    def test_circumscribing_beam_reports_truncation(self):
        beam, truncated = circumscribing_beam(np.eye(2) * 1e4, 3.0, 10.0, math.radians(1.8), math.radians(120.0))
        assert truncated
        assert beam == Beamwidth(math.radians(120.0), math.radians(120.0))

    def test_optimize_meets_budget(self):
        prob = problem()
        sol = optimize(prob)
        assert sol.feasible
        assert sol.p_mis <= prob.p_out_max + 1e-8
        assert sol.p_mis_tx <= sol.side_target + 1e-9
        assert sol.p_mis_rx <= sol.side_target + 1e-9
        assert sol.ptx == pytest.approx(required_ptx_worstcase(sol.w1, sol.w2, 50.0, prob.link))

    def test_optimize_hits_per_side_target_on_rotated_errors(self):
        prob = rotated_problem()
        sol = optimize(prob)
        assert sol.feasible
        assert sol.iterations <= 120
        assert abs(sol.p_mis_tx - sol.side_target) <= 1e-6
        assert abs(sol.p_mis_rx - sol.side_target) <= 1e-6
        assert abs(sol.p_mis - prob.p_out_max) <= 2e-6

    def test_optimize_beats_the_circumscribed_beam(self):
        prob = rotated_problem()
        sol = optimize(prob)
        c_tx, d = los_plane_side(prob.p1, prob.q1, prob.p2, prob.C_p1, prob.C_p2, prob.C_gamma1)
        s, _ = fit_principal_scale(c_tx.C, sol.side_target)
        wide, _ = circumscribing_beam(c_tx.C, s, d, prob.link.omega_min, prob.link.omega_max)
        assert sol.w1.az < wide.az
        assert sol.w1.el < wide.el
        assert misalignment_probability(wide, c_tx, d) < sol.p_mis_tx

    def test_optimize_exact_knowledge_uses_narrowest_beam(self):
        link = LinkConfig()
        sol = optimize(problem(sigma_p=0.0, sigma_gamma_deg=0.0))
        assert sol.feasible
        assert sol.p_mis == 0.0
        assert sol.w1 == Beamwidth(link.omega_min, link.omega_min)

    def test_worse_knowledge_costs_power(self):
        good = optimize(problem(sigma_p=0.1))
        bad = optimize(problem(sigma_p=1.0))
        assert bad.w1.az > good.w1.az
        assert bad.ptx > good.ptx

    def test_hopeless_errors_are_infeasible_not_raised(self):
        sol = optimize(problem(sigma_p=100.0))
        assert not sol.feasible
        assert sol.w1 == Beamwidth(math.radians(120.0), math.radians(120.0))
