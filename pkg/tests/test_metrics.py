import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.errors import ConfigError
from app.models import RunResult
from app.sim.engine import fair_fixed_beamwidth
from app.sim.metrics import metrics, snr_cdf
from app.sim.sweep import run_sweep, sweep_configs


def make_result(snr, w_deg=10.0, trace_cp=2.25, trace_cgamma=None) -> RunResult:
    snr = np.asarray(snr, dtype=float)
    n = snr.size
    w = np.full((n, 2), math.radians(w_deg))
    return RunResult(
        mode="heuristic",
        snr_min=3.94,
        t=np.arange(n) * 0.01,
        d=np.full(n, 40.0),
        w1=w,
        w2=2 * w,
        ptx=np.linspace(-10.0, 10.0, n),
        snr=snr,
        outage=snr < 3.94,
        err1=np.zeros((n, 2)),
        err2=np.zeros((n, 2)),
        g1=np.ones(n),
        g2=np.ones(n),
        eirp_clipped=np.zeros(n, dtype=bool),
        trace_cp=np.full(n, trace_cp),
        trace_cgamma=np.full(n, math.radians(1.5) ** 2 if trace_cgamma is None else trace_cgamma),
    )


def test_cdf_on_tenth_db_grid():
    grid, cdf = snr_cdf(np.array([3.0, 1.0, 2.0]))
    assert grid[0] == pytest.approx(1.0)
    assert grid[-1] == pytest.approx(3.0)
    assert_allclose(np.diff(grid), 0.1)
    assert cdf[0] == pytest.approx(1 / 3)
    assert cdf[-1] == 1.0
    assert np.all(np.diff(cdf) >= 0.0)


def test_cdf_grid_covers_fractional_extremes():
    grid, cdf = snr_cdf(np.array([-1.234, 5.678]))
    assert grid[0] <= -1.234 and grid[-1] >= 5.678
    assert cdf[-1] == 1.0


def test_summary_statistics():
    summary = metrics(make_result([1.0, 5.0, 6.0, 7.0]))
    assert summary.steps == 4
    assert summary.outage_rate == pytest.approx(0.25)
    assert summary.sigma_p == pytest.approx(1.5)
    assert summary.sigma_gamma_deg == pytest.approx(1.5)
    assert summary.ptx_mean == pytest.approx(0.0)
    assert summary.beam_min_deg == pytest.approx(10.0)
    assert summary.beam_max_deg == pytest.approx(20.0)
    assert summary.beam_mean_deg == pytest.approx(15.0)
    assert "snr_cdf" not in summary.to_flat()
    assert list(summary.cdf_frame().columns) == ["snr_db", "cdf"]


def test_empty_run_cannot_be_summarised():
    with pytest.raises(ValueError, match="empty"):
        metrics(make_result([]))


def test_fair_fixed_beamwidth_averages_both_ends():
    assert fair_fixed_beamwidth(make_result([5.0, 6.0])) == pytest.approx(15.0)


def test_records_round_trip_through_frame():
    result = make_result([5.0, 1.0])
    records = list(result.records())
    assert records[1].outage
    frame = result.to_frame()
    assert frame["omega2_az"].tolist() == pytest.approx([20.0, 20.0])
    assert frame["outage"].tolist() == [0, 1]


class TestSweep:
    def test_tau_axis_takes_milliseconds(self, short_config):
        configs = sweep_configs(short_config, "tau", [1.0, 100.0])
        assert [c.simulation.latency_tau for c in configs] == pytest.approx([0.001, 0.1])

    def test_sigma_gamma_axis_takes_degrees(self, short_config):
        (config,) = sweep_configs(short_config, "sigma_gamma", [0.15])
        assert config.simulation.sigma_gamma_deg == pytest.approx(0.15)

    def test_unknown_axis(self, short_config):
        with pytest.raises(ConfigError, match="unknown sweep axis"):
            sweep_configs(short_config, "speed", [1.0])

    def test_empty_values(self, short_config):
        with pytest.raises(ConfigError, match="at least one"):
            sweep_configs(short_config, "k", [])

    def test_invalid_value(self, short_config):
        with pytest.raises(ConfigError, match="invalid k"):
            sweep_configs(short_config, "k", [0.0])

    def test_sweep_over_confidence_factor(self, short_config, short_trajectory):
        entries = run_sweep(short_config, "k", [2.0, 4.0], trajectory=short_trajectory)
        assert [e.value for e in entries] == [2.0, 4.0]
        assert entries[1].summary.beam_mean_deg > entries[0].summary.beam_mean_deg
        assert entries[1].summary.ptx_mean > entries[0].summary.ptx_mean
