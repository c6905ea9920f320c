import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.config import NoiseConfig, SegmentConfig, TrajectoryConfig
from app.fusion import euler_cov_from_quat_cov
from app.geometry import quat_to_euler, wrap_angle
from app.sim.estimates import ekf_estimates, perturb_orientation, sampled_estimates, vehicle_estimates
from app.sim.pairing import pair_vehicles
from app.sim.trajectory import generate_trajectory


@pytest.fixture
def pair():
    cfg = TrajectoryConfig(
        initial_speed=10.0,
        segments=[
            SegmentConfig(kind="straight", length=100.0),
            SegmentConfig(kind="arc", radius=60.0, angle_deg=45.0),
            SegmentConfig(kind="straight", length=100.0),
        ],
        imu_noise=False,
    )
    traj = generate_trajectory(cfg, rate=100.0)
    return traj, pair_vehicles(traj, 2.0)


def test_sampled_errors_match_covariances(pair, rng):
    _, vehicles = pair
    C_p = np.diag([0.5, 0.5, 0.1])
    C_gamma = math.radians(1.0) ** 2 * np.eye(3)
    stream = sampled_estimates(vehicles.lead, C_p, C_gamma, rng)
    errors = stream.p_hat - vehicles.lead.p
    assert_allclose(np.cov(errors.T), C_p, atol=0.05)
    yaw_err = wrap_angle(
        np.array([quat_to_euler(q).yaw for q in stream.q_hat]) - np.array([quat_to_euler(q).yaw for q in vehicles.lead.q])
    )
    assert np.std(yaw_err) == pytest.approx(math.radians(1.0), rel=0.1)
    assert_allclose(stream.euler_cov(0), C_gamma, atol=1e-9)


def test_stream_exports_peer_estimates(pair, rng):
    _, vehicles = pair
    stream = sampled_estimates(vehicles.lead, 0.25 * np.eye(3), 1e-4 * np.eye(3), rng)
    estimate = stream.at(5)
    assert estimate.timestamp == pytest.approx(vehicles.t[5])
    assert_allclose(estimate.v_hat, vehicles.lead.v[5])
    assert_allclose(estimate.C_p_hat, 0.25 * np.eye(3))
    assert estimate.advanced(0.5).p_hat == pytest.approx(estimate.p_hat + 0.5 * estimate.v_hat)


def test_perturb_orientation_without_noise_is_identity(pair, rng):
    _, vehicles = pair
    q = perturb_orientation(vehicles.lead.q[:5], np.zeros((3, 3)), rng)
    assert_allclose(np.abs(np.sum(q * vehicles.lead.q[:5], axis=1)), 1.0, atol=1e-12)


def test_ekf_tracks_the_vehicle(pair, rng):
    traj, vehicles = pair
    noise = NoiseConfig()
    stream = ekf_estimates(traj, vehicles.t, noise, gps_rate=10.0, rng=rng)
    errors = np.linalg.norm(stream.p_hat - traj.p[-len(vehicles):], axis=1)
    assert np.mean(errors[len(errors) // 2 :]) < 1.5
    trace = np.trace(stream.C_p, axis1=1, axis2=2)
    assert trace[-1] < 3 * noise.sigma_gnss**2
    C_gamma = euler_cov_from_quat_cov(stream.q_hat[-1], stream.C_q[-1])
    assert np.all(np.linalg.eigvalsh(C_gamma) > -1e-12)


def test_follower_ekf_runs_on_delayed_time(pair, rng):
    traj, vehicles = pair
    stream = vehicle_estimates(
        "full_ekf", vehicles.follow, traj, 2.0, NoiseConfig(), np.eye(3), np.eye(3), 10.0, rng
    )
    assert_allclose(stream.t, vehicles.t)
    errors = np.linalg.norm(stream.p_hat - vehicles.follow.p, axis=1)
    assert np.mean(errors) < 2.0
