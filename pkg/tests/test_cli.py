from pathlib import Path

import pandas as pd
import pytest

from app.main import EXIT_INPUT, EXIT_OK, build_parser, main


@pytest.fixture
def config_file(short_config, tmp_path) -> Path:
    path = tmp_path / "short.toml"
    path.write_text(short_config.to_toml())
    return path


@pytest.fixture
def out_dir(tmp_path) -> Path:
    return tmp_path / "cli-out"


def read_summary(out_dir: Path) -> dict:
    text = (out_dir / "summary.txt").read_text()
    return dict(line.split(" = ", 1) for line in text.splitlines())


def test_run_writes_results(config_file, out_dir, capsys):
    code = main(["run", "--config", str(config_file), "--out-dir", str(out_dir)])
    assert code == EXIT_OK
    assert {p.name for p in out_dir.iterdir()} == {"results.csv", "summary.txt", "cdf.csv"}
    assert "outage_rate = " in capsys.readouterr().out


def test_fixed_beam_flag(config_file, out_dir):
    code = main(
        ["run", "--config", str(config_file), "--out-dir", str(out_dir), "--mode", "fixed", "--fixed-beam-deg", "13"]
    )
    assert code == EXIT_OK
    summary = read_summary(out_dir)
    assert summary["mode"] == "fixed"
    assert float(summary["beam_min_deg"]) == pytest.approx(13.0)


def test_scenario_and_explicit_flags(config_file, out_dir):
    code = main(
        ["run", "--config", str(config_file), "--out-dir", str(out_dir), "--scenario", "S2", "--sigma-p", "0.3"]
    )
    assert code == EXIT_OK
    assert float(read_summary(out_dir)["sigma_p"]) == pytest.approx(0.3)


def test_missing_trajectory_is_input_error(config_file, out_dir, tmp_path, capsys):
    code = main(
        ["run", "--config", str(config_file), "--out-dir", str(out_dir), "--trajectory", str(tmp_path / "no.csv")]
    )
    assert code == EXIT_INPUT
    assert not out_dir.exists()
    assert "not found" in capsys.readouterr().err


def test_tau_sweep(config_file, out_dir):
    code = main(["sweep", "--config", str(config_file), "--out-dir", str(out_dir), "--axis", "tau", "--values", "1", "100"])
    assert code == EXIT_OK
    frame = pd.read_csv(out_dir / "sweep_tau.csv")
    assert list(frame.columns) == ["snr_db", "tau=1", "tau=100"]
    summary = pd.read_csv(out_dir / "sweep_tau_summary.csv")
    assert summary["value"].tolist() == [1.0, 100.0]


def test_sweep_without_values(config_file, out_dir):
    code = main(["sweep", "--config", str(config_file), "--out-dir", str(out_dir), "--axis", "k", "--values"])
    assert code == EXIT_INPUT
    assert not out_dir.exists()


def test_unknown_sweep_axis_rejected_by_parser():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["sweep", "--axis", "speed", "--values", "1"])


def test_calibrate_is_idempotent(out_dir, capsys):
    assert main(["calibrate", "--out-dir", str(out_dir)]) == EXIT_OK
    first = (out_dir / "calibration.toml").read_text()
    assert main(["calibrate", "--out-dir", str(out_dir), "--calibration", str(out_dir / "calibration.toml")]) == EXIT_OK
    assert (out_dir / "calibration.toml").read_text() == first
    assert "passed = True" in capsys.readouterr().out


def test_bad_config_is_input_error(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("[simulation]\nsigma = 1.0\n")
    assert main(["run", "--config", str(path)]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_unreadable_config_is_input_error(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[simulation\n")
    assert main(["run", "--config", str(path)]) == EXIT_INPUT
