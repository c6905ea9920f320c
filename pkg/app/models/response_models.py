"""
Result models: per-step decisions, optimizer problems and solutions, run
records and summaries.
"""

from typing import Dict, Iterator, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config.app_config import LinkConfig
from app.models.models import Beamwidth, FloatArray, LosAngles, PointingError, _check_shape


class BpcDecision(BaseModel):
    """One vehicle's output of the sensor-assisted BPC step."""

    beamwidth: Beamwidth = Field(description="Own beamwidth, rad")
    peer_beamwidth: Beamwidth = Field(description="Beamwidth assumed for the peer, rad")
    ptx: float = Field(description="Tx power, dBm")
    pointing: LosAngles = Field(description="Estimated LOS angles to the peer, rad")
    sigma_alpha: float = Field(ge=0.0, description="Azimuth pointing std, rad")
    sigma_beta: float = Field(ge=0.0, description="Elevation pointing std, rad")
    d_hat: Optional[float] = Field(default=None, gt=0.0, description="Estimated distance, m; None before the first exchange")
    eirp_clipped: bool = Field(default=False, description="Tx power was clipped to the EIRP limit")

    model_config = ConfigDict(frozen=True)


class LinkDecision(BaseModel):
    """Configuration applied to the link at one step (vehicle 1 transmits)."""

    w1: Beamwidth = Field(description="Tx beamwidth, rad")
    w2: Beamwidth = Field(description="Rx beamwidth, rad")
    ptx: float = Field(description="Tx power, dBm")
    pointing1: LosAngles = Field(description="Tx beam axis in the vehicle-1 frame, rad")
    pointing2: LosAngles = Field(description="Rx beam axis in the vehicle-2 frame, rad")
    eirp_clipped: bool = Field(default=False)
    feasible: bool = Field(default=True, description="False when the optimizer could not meet its budget")

    model_config = ConfigDict(frozen=True)


class LosPlaneCovariance(BaseModel):
    """Error covariance on the plane transverse to the LOS, m^2."""

    C: FloatArray = Field(description="2x2 covariance over (x, z) of the LOS frame")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("C")
    @classmethod
    def _psd(cls, value: np.ndarray) -> np.ndarray:
        _check_shape(value, (2, 2), "C")
        if not np.allclose(value, value.T, atol=1e-10):
            raise ValueError("LOS-plane covariance must be symmetric")
        if np.min(np.linalg.eigvalsh(value)) < -1e-9:
            raise ValueError("LOS-plane covariance must be positive semidefinite")
        return 0.5 * (value + value.T)

    def __add__(self, other: "LosPlaneCovariance") -> "LosPlaneCovariance":
        return LosPlaneCovariance(C=self.C + other.C)


class OptProblem(BaseModel):
    """Outage-constrained beamwidth and power problem for one step."""

    p1: FloatArray = Field(description="True Tx position, m")
    q1: FloatArray = Field(description="True Tx orientation")
    p2: FloatArray = Field(description="True Rx position, m")
    q2: FloatArray = Field(description="True Rx orientation")
    C_p1: FloatArray = Field(description="Tx position covariance (nav), m^2")
    C_p2: FloatArray = Field(description="Rx position covariance (nav), m^2")
    C_gamma1: FloatArray = Field(description="Tx Euler covariance, rad^2")
    C_gamma2: FloatArray = Field(description="Rx Euler covariance, rad^2")
    p_out_max: float = Field(gt=0.0, lt=0.5, description="Outage budget")
    link: LinkConfig = Field(description="Link budget configuration")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("p1", "p2")
    @classmethod
    def _pos(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (3,), "position")

    @field_validator("q1", "q2")
    @classmethod
    def _quat(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (4,), "orientation")

    @field_validator("C_p1", "C_p2", "C_gamma1", "C_gamma2")
    @classmethod
    def _cov(cls, value: np.ndarray) -> np.ndarray:
        return _check_shape(value, (3, 3), "covariance")


class OptSolution(BaseModel):
    """Optimizer output; infeasible results are returned, not raised."""

    w1: Beamwidth
    w2: Beamwidth
    ptx: float = Field(description="Tx power, dBm")
    p_mis: float = Field(ge=0.0, le=1.0, description="Achieved total misalignment probability")
    p_mis_tx: float = Field(ge=0.0, le=1.0)
    p_mis_rx: float = Field(ge=0.0, le=1.0)
    side_target: float = Field(description="Per-side misalignment target")
    iterations: int = Field(ge=0, description="Bisection iterations, summed over both sides")
    feasible: bool

    model_config = ConfigDict(frozen=True)


class TimeStepRecord(BaseModel):
    """One simulation step evaluated against the true geometry."""

    t: float
    d: float = Field(description="True distance, m")
    w1: Beamwidth
    w2: Beamwidth
    ptx: float = Field(description="Tx power, dBm")
    snr: float = Field(description="SNR at the receiver, dB")
    outage: bool
    err1: PointingError = Field(description="Tx pointing error, rad")
    err2: PointingError = Field(description="Rx pointing error, rad")
    g1: float = Field(description="Tx pattern gain")
    g2: float = Field(description="Rx pattern gain")
    eirp_clipped: bool = False
    trace_cp: float = Field(description="Trace of the Tx position covariance, m^2")
    trace_cgamma: float = Field(description="Trace of the Tx Euler covariance, rad^2")

    model_config = ConfigDict(frozen=True)


_RESULT_COLUMNS = (
    "t", "d", "w1", "w2", "ptx", "snr", "outage", "err1", "err2",
    "g1", "g2", "eirp_clipped", "trace_cp", "trace_cgamma",
)


class RunResult(BaseModel):
    """Per-step results of one run, stored column-wise."""

    mode: str
    snr_min: float = Field(description="Outage threshold used, dB")
    t: FloatArray
    d: FloatArray
    w1: FloatArray = Field(description="(n, 2) Tx beamwidths az/el, rad")
    w2: FloatArray = Field(description="(n, 2) Rx beamwidths az/el, rad")
    ptx: FloatArray
    snr: FloatArray
    outage: np.ndarray
    err1: FloatArray = Field(description="(n, 2) Tx pointing errors, rad")
    err2: FloatArray = Field(description="(n, 2) Rx pointing errors, rad")
    g1: FloatArray
    g2: FloatArray
    eirp_clipped: np.ndarray
    trace_cp: FloatArray
    trace_cgamma: FloatArray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("outage", "eirp_clipped", mode="before")
    @classmethod
    def _bool(cls, value: object) -> np.ndarray:
        return np.asarray(value, dtype=bool)

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @classmethod
    def from_records(cls, mode: str, snr_min: float, records: List[TimeStepRecord]) -> "RunResult":
        columns: Dict[str, list] = {name: [] for name in _RESULT_COLUMNS}
        for record in records:
            for name in _RESULT_COLUMNS:
                columns[name].append(getattr(record, name))
        return cls(mode=mode, snr_min=snr_min, **{k: np.asarray(v) for k, v in columns.items()})

    def records(self) -> Iterator[TimeStepRecord]:
        for i in range(len(self)):
            yield TimeStepRecord(
                t=float(self.t[i]),
                d=float(self.d[i]),
                w1=Beamwidth(*self.w1[i]),
                w2=Beamwidth(*self.w2[i]),
                ptx=float(self.ptx[i]),
                snr=float(self.snr[i]),
                outage=bool(self.outage[i]),
                err1=PointingError(*self.err1[i]),
                err2=PointingError(*self.err2[i]),
                g1=float(self.g1[i]),
                g2=float(self.g2[i]),
                eirp_clipped=bool(self.eirp_clipped[i]),
                trace_cp=float(self.trace_cp[i]),
                trace_cgamma=float(self.trace_cgamma[i]),
            )

    def to_frame(self) -> pd.DataFrame:
        """Results table with angles in degrees."""
        w1 = np.degrees(self.w1)
        w2 = np.degrees(self.w2)
        e1 = np.degrees(self.err1)
        e2 = np.degrees(self.err2)
        return pd.DataFrame(
            {
                "t": self.t,
                "d": self.d,
                "omega1_az": w1[:, 0],
                "omega1_el": w1[:, 1],
                "omega2_az": w2[:, 0],
                "omega2_el": w2[:, 1],
                "ptx_dbm": self.ptx,
                "snr_db": self.snr,
                "outage": self.outage.astype(int),
                "err_az1": e1[:, 0],
                "err_el1": e1[:, 1],
                "err_az2": e2[:, 0],
                "err_el2": e2[:, 1],
            }
        )


class RunSummary(BaseModel):
    """Aggregate metrics of a run."""

    mode: str
    steps: int = Field(gt=0)
    sigma_p: float = Field(description="sqrt of the mean position-covariance trace, m")
    sigma_gamma_deg: float = Field(description="sqrt of the mean Euler-covariance trace, deg")
    outage_rate: float = Field(ge=0.0, le=1.0)
    ptx_mean: float = Field(description="dBm")
    ptx_median: float = Field(description="dBm")
    beam_min_deg: float
    beam_max_deg: float
    beam_mean_deg: float
    eirp_clipped_steps: int = Field(ge=0)
    snr_grid: FloatArray = Field(description="SNR grid, dB, 0.1 dB spacing")
    snr_cdf: FloatArray = Field(description="Empirical P(SNR <= grid)")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def to_flat(self) -> Dict[str, object]:
        """Scalar fields only, for the key-value summary file."""
        return self.model_dump(exclude={"snr_grid", "snr_cdf"})

    def cdf_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"snr_db": self.snr_grid, "cdf": self.snr_cdf})


class OutageEstimate(BaseModel):
    """Monte Carlo outage and misalignment rates with binomial standard errors."""

    n_trials: int = Field(gt=0)
    outage: float = Field(ge=0.0, le=1.0)
    outage_se: float = Field(ge=0.0)
    misalignment: float = Field(ge=0.0, le=1.0)
    misalignment_se: float = Field(ge=0.0)
    misalignment_tx: float = Field(default=0.0, ge=0.0, le=1.0, description="Leader end outside its -3 dB footprint")
    misalignment_tx_se: float = Field(default=0.0, ge=0.0)
    misalignment_rx: float = Field(default=0.0, ge=0.0, le=1.0, description="Follower end outside its -3 dB footprint")
    misalignment_rx_se: float = Field(default=0.0, ge=0.0)

    model_config = ConfigDict(frozen=True)


class CalibrationReport(BaseModel):
    """Gain-constant calibration against the worked link-budget anchors."""

    gain_constant: float = Field(gt=0.0, description="K_g")
    anchor_gain_db: float = Field(description="Boresight gain at the anchor beamwidth, dB")
    anchor_ptx_dbm: float = Field(description="Recomputed anchor Tx power, dBm")
    anchor_residual_db: float
    second_ptx_dbm: float = Field(description="Tx power at the second anchor beamwidth, dBm")
    second_expected_dbm: float
    second_residual_db: float
    proportionality_delta_db: float = Field(description="Tx power change between the two anchors, dB")
    tolerance_db: float
    passed: bool

    model_config = ConfigDict(frozen=True)

    def to_flat(self) -> Dict[str, object]:
        return self.model_dump()


class SweepEntry(BaseModel):
    """One value of a parameter sweep."""

    axis: str
    value: float
    summary: RunSummary

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

