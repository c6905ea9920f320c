"""
File-based results storage.

Writes run tables, summaries, CDFs, sweep comparisons and calibration files
into one output directory.
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd
import structlog

from app.config.app_config import dump_toml
from app.models.response_models import CalibrationReport, RunResult, RunSummary, SweepEntry

logger = structlog.get_logger(__name__)

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.txt"
CDF_FILE = "cdf.csv"
CALIBRATION_FILE = "calibration.toml"


def _format_value(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ResultsStore:
    """Output directory for simulator artefacts."""

    def __init__(self, output_dir: Path | str) -> None:
        self.output_dir = Path(output_dir)

    def _ensure_output_dir(self) -> None:
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str) -> Path:
        self._ensure_output_dir()
        return self.output_dir / name

    def write_results(self, result: RunResult) -> Path:
        """Per-step table; angles in degrees."""
        path = self._path(RESULTS_FILE)
        result.to_frame().to_csv(path, index=False)
        logger.debug("Results saved", path=str(path), steps=len(result))
        return path

    def write_summary(self, summary: RunSummary, extra: Optional[Dict[str, object]] = None) -> Path:
        """Flat `key = value` lines."""
        path = self._path(SUMMARY_FILE)
        flat = {**summary.to_flat(), **(extra or {})}
        path.write_text("".join(f"{key} = {_format_value(value)}\n" for key, value in flat.items()))
        logger.debug("Summary saved", path=str(path))
        return path

    def write_cdf(self, summary: RunSummary) -> Path:
        path = self._path(CDF_FILE)
        summary.cdf_frame().to_csv(path, index=False)
        return path

    def write_run(self, result: RunResult, summary: RunSummary, extra: Optional[Dict[str, object]] = None) -> List[Path]:
        return [self.write_results(result), self.write_summary(summary, extra), self.write_cdf(summary)]

    def write_sweep(self, axis: str, entries: Sequence[SweepEntry]) -> List[Path]:
        """One CDF column per sweep value on a common grid, plus a summary table."""
        curves = [
            entry.summary.cdf_frame().set_index("snr_db")["cdf"].rename(f"{axis}={entry.value:g}")
            for entry in entries
        ]
        merged = pd.concat(curves, axis=1).sort_index()
        # below a curve's first grid point its CDF is 0, above its last it is 1
        merged = merged.ffill().fillna(0.0)
        merged.index.name = "snr_db"
        cdf_path = self._path(f"sweep_{axis}.csv")
        merged.reset_index().to_csv(cdf_path, index=False)

        rows = [{"axis": axis, "value": entry.value, **entry.summary.to_flat()} for entry in entries]
        summary_path = self._path(f"sweep_{axis}_summary.csv")
        pd.DataFrame(rows).to_csv(summary_path, index=False)
        logger.info("Sweep saved", axis=axis, values=len(entries), path=str(cdf_path))
        return [cdf_path, summary_path]

    def write_calibration(self, report: CalibrationReport) -> Path:
        """TOML file with the calibrated gain constant, readable as a config overlay."""
        path = self._path(CALIBRATION_FILE)
        path.write_text(dump_toml({"link": {"gain_constant": report.gain_constant}}))
        logger.info("Calibration saved", path=str(path), gain_constant=report.gain_constant)
        return path

    def list_outputs(self) -> List[Path]:
        if not self.output_dir.exists():
            return []
        return sorted(p for p in self.output_dir.iterdir() if p.is_file())


_stores: Dict[Path, ResultsStore] = {}


def get_results_store(output_dir: Path | str) -> ResultsStore:
    """Get the store for an output directory."""
    key = Path(output_dir).resolve()
    if key not in _stores:
        _stores[key] = ResultsStore(key)
    return _stores[key]
