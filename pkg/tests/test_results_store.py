import math

import numpy as np
import pandas as pd
import pytest

from app.config import AppConfigLoader, LinkConfig
from app.channel import calibrate
from app.models import SweepEntry
from app.sim.metrics import metrics
from app.utils import ResultsStore, get_results_store
from tests.test_metrics import make_result


@pytest.fixture
def store(tmp_path) -> ResultsStore:
    return ResultsStore(tmp_path / "out")


def test_write_run_creates_three_files(store):
    result = make_result([1.0, 5.0, 6.0])
    paths = store.write_run(result, metrics(result), {"snr_min": 3.94})
    assert [p.name for p in paths] == ["results.csv", "summary.txt", "cdf.csv"]
    assert store.list_outputs() == sorted(paths)


def test_results_table_in_degrees(store):
    result = make_result([1.0, 5.0])
    frame = pd.read_csv(store.write_results(result))
    assert frame["omega1_az"].tolist() == pytest.approx([10.0, 10.0])
    assert frame["outage"].tolist() == [1, 0]
    assert list(frame.columns)[:3] == ["t", "d", "omega1_az"]


def test_summary_is_key_value_lines(store):
    result = make_result([1.0, 5.0])
    text = store.write_summary(metrics(result), {"snr_min": 3.94}).read_text()
    values = dict(line.split(" = ", 1) for line in text.splitlines())
    assert float(values["outage_rate"]) == pytest.approx(0.5)
    assert float(values["snr_min"]) == pytest.approx(3.94)
    assert values["mode"] == "heuristic"


def test_sweep_merges_cdfs_on_common_grid(store):
    entries = [
        SweepEntry(axis="tau", value=1.0, summary=metrics(make_result([1.0, 2.0]))),
        SweepEntry(axis="tau", value=10.0, summary=metrics(make_result([1.5, 3.0]))),
    ]
    cdf_path, summary_path = store.write_sweep("tau", entries)
    assert cdf_path.name == "sweep_tau.csv"
    frame = pd.read_csv(cdf_path)
    assert list(frame.columns) == ["snr_db", "tau=1", "tau=10"]
    assert frame["snr_db"].iloc[0] == pytest.approx(1.0)
    assert frame["snr_db"].iloc[-1] == pytest.approx(3.0)
    assert frame["tau=10"].iloc[0] == 0.0
    assert frame["tau=1"].iloc[-1] == 1.0
    assert np.all(np.diff(frame["tau=10"]) >= 0.0)
    summary = pd.read_csv(summary_path)
    assert summary["value"].tolist() == [1.0, 10.0]


def test_calibration_file_is_a_config_overlay(store):
    path = store.write_calibration(calibrate(LinkConfig()))
    config = AppConfigLoader.build(calibration_path=path, use_env=False)
    assert config.link.gain_constant == pytest.approx(LinkConfig().gain_constant, rel=1e-12)
    assert math.isfinite(config.link.gain_constant)


def test_store_created_lazily(tmp_path):
    store = ResultsStore(tmp_path / "later")
    assert store.list_outputs() == []
    assert not (tmp_path / "later").exists()


def test_get_results_store_is_shared_per_directory(tmp_path):
    assert get_results_store(tmp_path) is get_results_store(str(tmp_path))
    assert get_results_store(tmp_path / "a") is not get_results_store(tmp_path / "b")
