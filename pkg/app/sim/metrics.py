"""
Run summaries: error levels, SNR CDF, outage rate, power and beamwidth statistics.
"""

import math

import numpy as np

from app.models.response_models import RunResult, RunSummary

CDF_RESOLUTION = 10.0  # grid points per dB


def snr_cdf(snr: np.ndarray):
    """Empirical CDF of the SNR on a 0.1 dB grid spanning the samples."""
    ordered = np.sort(np.asarray(snr, dtype=float))
    lo = math.floor(ordered[0] * CDF_RESOLUTION)
    hi = math.ceil(ordered[-1] * CDF_RESOLUTION)
    grid = np.arange(lo, hi + 1) / CDF_RESOLUTION
    return grid, np.searchsorted(ordered, grid, side="right") / ordered.size


def metrics(result: RunResult) -> RunSummary:
    if len(result) == 0:
        raise ValueError("cannot summarise an empty run")
    grid, cdf = snr_cdf(result.snr)
    beams = np.degrees(np.concatenate([result.w1.ravel(), result.w2.ravel()]))
    return RunSummary(
        mode=result.mode,
        steps=len(result),
        sigma_p=float(np.sqrt(np.mean(result.trace_cp))),
        sigma_gamma_deg=float(np.degrees(np.sqrt(np.mean(result.trace_cgamma)))),
        outage_rate=float(np.mean(result.outage)),
        ptx_mean=float(np.mean(result.ptx)),
        ptx_median=float(np.median(result.ptx)),
        beam_min_deg=float(beams.min()),
        beam_max_deg=float(beams.max()),
        beam_mean_deg=float(beams.mean()),
        eirp_clipped_steps=int(np.count_nonzero(result.eirp_clipped)),
        snr_grid=grid,
        snr_cdf=cdf,
    )
