import math

import numpy as np
import pytest

from app.bpc import (
    OMEGA_MAX,
    OMEGA_MIN,
    bpc_gradients,
    bpc_step,
    fixed_power_control,
    initial_decision,
    pointing_statistics,
    power_control,
    select_beamwidth,
)
from app.channel import WORST_CASE_LOSS_DB, max_gain_db, path_loss_db
from app.config import LinkConfig
from app.errors import NonPsdCovarianceError
from app.fusion import quat_cov_from_euler_cov
from app.geometry import IDENTITY, euler_to_quat, los_angles, quat_conjugate, rotation_matrix_unchecked
from app.models import Beamwidth, LosAngles, PeerEstimate


def estimate(p, q=IDENTITY, var_p=0.0, C_q=None) -> PeerEstimate:
    return PeerEstimate(
        p_hat=np.asarray(p, dtype=float),
        C_p_hat=var_p * np.eye(3),
        q_hat=np.asarray(q, dtype=float),
        C_q_hat=np.zeros((4, 4)) if C_q is None else C_q,
    )


@pytest.fixture
def link() -> LinkConfig:
    return LinkConfig()


def test_select_beamwidth_k_sigma_and_clamps():
    w = select_beamwidth(0.05, 0.02, 3.0)
    assert w.az == pytest.approx(0.3)
    assert w.el == pytest.approx(0.12)
    assert select_beamwidth(0.0, 0.0, 3.0) == Beamwidth(OMEGA_MIN, OMEGA_MIN)
    assert select_beamwidth(10.0, 10.0, 3.0) == Beamwidth(OMEGA_MAX, OMEGA_MAX)


def test_select_beamwidth_snaps_up_to_codebook():
    codebook = [math.radians(d) for d in (5.0, 10.0, 20.0)]
    w = select_beamwidth(math.radians(1.0), math.radians(2.0), 3.0, codebook=codebook)
    assert w == Beamwidth(math.radians(10.0), math.radians(20.0))


def test_select_beamwidth_rejects_non_positive_k():
    with pytest.raises(ValueError, match="confidence factor"):
        select_beamwidth(0.1, 0.1, 0.0)


def test_select_beamwidth_accepts_array_codebook():
    codebook = np.radians([5.0, 10.0, 20.0])
    w = select_beamwidth(math.radians(1.0), math.radians(2.0), 3.0, codebook=codebook)
    assert w.az == pytest.approx(math.radians(10.0))
    assert w.el == pytest.approx(math.radians(20.0))
    assert select_beamwidth(0.0, 0.0, 3.0, codebook=np.array([])) == Beamwidth(OMEGA_MIN, OMEGA_MIN)


def _fd(f, x, eps=1e-6):
    cols = []
    for i in range(len(x)):
        step = np.zeros(len(x))
        step[i] = eps
        cols.append((f(x + step) - f(x - step)) / (2 * eps))
    return np.column_stack(cols)


def test_bpc_gradients_match_finite_differences():
    q = euler_to_quat((0.05, -0.02, 0.4))
    own, peer = estimate([1.0, -2.0, 0.3], q), estimate([31.0, 8.0, 1.5])
    B_q1, B_dp, b_alpha, b_beta = bpc_gradients(own, peer)
    dp_nav = peer.p_hat - own.p_hat

    assert np.allclose(B_dp, _fd(lambda d: rotation_matrix_unchecked(q).T @ d, dp_nav), atol=1e-8)
    q_bar = quat_conjugate(q)
    assert np.allclose(B_q1, _fd(lambda m: rotation_matrix_unchecked(m) @ dp_nav, q_bar), atol=1e-6)

    angles = _fd(lambda d: np.array(los_angles(B_dp @ d)), dp_nav)
    assert np.allclose(angles[0], b_alpha @ B_dp, atol=1e-8)
    assert np.allclose(angles[1], b_beta @ B_dp, atol=1e-8)


def test_pointing_statistics_matches_monte_carlo_with_orientation_error(rng):
    e = np.array([0.05, -0.02, 0.4])
    q = euler_to_quat(e)
    C_gamma = np.diag(np.radians([0.5, 0.5, 1.0]) ** 2)
    var_p = 0.25
    own = estimate([0.0, 0.0, 0.0], q, var_p=var_p, C_q=quat_cov_from_euler_cov(q, C_gamma))
    peer = estimate([30.0, 10.0, 1.0], var_p=var_p)
    _, s_alpha, s_beta = pointing_statistics(own, peer)

    n = 200_000
    q_s = euler_to_quat(rng.multivariate_normal(e, C_gamma, size=n))
    dp_s = (peer.p_hat - own.p_hat) + rng.normal(scale=math.sqrt(2 * var_p), size=(n, 3))
    local = np.einsum("nji,nj->ni", rotation_matrix_unchecked(q_s), dp_s)
    sampled = los_angles(local)
    assert np.std(sampled.azimuth) == pytest.approx(s_alpha, rel=0.03)
    assert np.std(sampled.elevation) == pytest.approx(s_beta, rel=0.03)


def test_pointing_statistics_position_only():
    sigma2 = 0.25
    own, peer = estimate([0, 0, 0], var_p=sigma2), estimate([20, 0, 0], var_p=sigma2)
    pointing, s_alpha, s_beta = pointing_statistics(own, peer)
    assert pointing == pytest.approx(LosAngles(0.0, 0.0))
    assert s_alpha == pytest.approx(math.sqrt(2 * sigma2) / 20.0)
    assert s_beta == pytest.approx(math.sqrt(2 * sigma2) / 20.0)


def test_pointing_statistics_rotated_vehicle():
    q = euler_to_quat((0.0, 0.0, math.pi / 2))
    pointing, _, _ = pointing_statistics(estimate([0, 0, 0], q), estimate([0, 15, 0]))
    assert pointing.azimuth == pytest.approx(0.0, abs=1e-12)


def test_pointing_statistics_rejects_bad_covariance():
    own = estimate([0, 0, 0])
    peer = PeerEstimate(p_hat=[10.0, 0, 0], C_p_hat=-np.eye(3), q_hat=IDENTITY, C_q_hat=np.zeros((4, 4)))
    with pytest.raises(NonPsdCovarianceError):
        pointing_statistics(own, peer)


def test_power_control_worst_case_formula(link):
    w1, w2 = Beamwidth.from_degrees(10.0), Beamwidth.from_degrees(20.0)
    ptx, clipped = power_control(w1, w2, 50.0, link)
    expected = (
        link.snr_min
        + path_loss_db(50.0, link.f0)
        + link.noise_power
        - (max_gain_db(w1, link) + max_gain_db(w2, link) - WORST_CASE_LOSS_DB)
    )
    assert not clipped
    assert ptx == pytest.approx(expected)


def test_power_control_clips_at_eirp(link):
    w = Beamwidth.from_degrees(120.0)
    ptx, clipped = power_control(w, w, 1e6, link)
    assert clipped
    assert ptx + max_gain_db(w, link) == pytest.approx(link.eirp_max)


def test_power_control_margin(link):
    w = Beamwidth.from_degrees(10.0)
    base, _ = power_control(w, w, 50.0, link)
    padded, _ = power_control(w, w, 50.0, link, margin=3.0)
    assert padded - base == pytest.approx(3.0)


def test_fixed_power_control_uses_same_beam(link):
    w = Beamwidth.from_degrees(13.0)
    assert fixed_power_control(w, 40.0, link) == pytest.approx(power_control(w, w, 40.0, link)[0])


def test_bpc_step_sizes_both_beams(link):
    own, peer = estimate([0, 0, 0], var_p=0.25), estimate([20, 0, 0], var_p=0.25)
    decision = bpc_step(own, peer, link, k=3.0)
    expected = 2 * 3.0 * math.sqrt(0.5) / 20.0
    assert decision.beamwidth.az == pytest.approx(expected)
    assert decision.peer_beamwidth.az == pytest.approx(expected)
    assert decision.d_hat == pytest.approx(20.0)
    assert decision.ptx == pytest.approx(power_control(decision.beamwidth, decision.peer_beamwidth, 20.0, link)[0])


def test_bpc_step_exact_estimates_pin_narrowest_beam(link):
    decision = bpc_step(estimate([0, 0, 0]), estimate([30, 5, 0]), link, k=3.0)
    assert decision.beamwidth == Beamwidth(link.omega_min, link.omega_min)
    assert not decision.eirp_clipped


def test_initial_decision_widest_beam_at_eirp(link):
    decision = initial_decision(link, LosAngles(math.pi, 0.0))
    assert decision.beamwidth == Beamwidth(link.omega_max, link.omega_max)
    assert decision.ptx + max_gain_db(decision.beamwidth, link) == pytest.approx(link.eirp_max)
    assert decision.pointing.azimuth == pytest.approx(math.pi)
    assert decision.d_hat is None
