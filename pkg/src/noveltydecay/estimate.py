"""Growth-ratio and novelty-curve estimators for a cohort."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import Cohort, MeanVarSeries, ModelError, NoveltyCurve


class EstimationError(ModelError):
    pass


class GrowthRatio(NamedTuple):
    slope: float
    residual_rms: float


def mean_variance_series(cohort: Cohort) -> MeanVarSeries:
    """Cross-story mean and unbiased variance of ``log n(t) - log n(0)``, t = 1..horizon."""
    if len(cohort) < 2:
        raise EstimationError("need at least 2 stories for a sample variance")
    if cohort.horizon < 1:
        raise EstimationError("cohort horizon must be >= 1")
    inc = cohort.log_increments()[:, 1:]
    mean = inc.mean(axis=0)
    var = inc.var(axis=0, ddof=1)
    return MeanVarSeries(np.arange(1, cohort.horizon + 1), mean, var)


def estimate_growth_ratio(series: MeanVarSeries) -> GrowthRatio:
    """Least-squares slope of mean against variance, constrained through the origin."""
    if len(series) < 2:
        raise EstimationError("need at least 2 points")
    x, y = series.variance, series.mean
    sxx = float(np.dot(x, x))
    if sxx == 0.0:
        raise EstimationError("deterministic cohort, ratio undefined")
    slope = float(np.dot(x, y)) / sxx
    resid = y - slope * x
    return GrowthRatio(slope, float(np.sqrt(np.mean(resid * resid))))


def centered_moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centred moving average; the half-width shrinks symmetrically at both ends."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be an odd integer >= 1")
    values = np.asarray(values, dtype=float)
    if window == 1:
        return values.copy()
    half = window // 2
    n = values.size
    csum = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(n)
    h = np.minimum(half, np.minimum(idx, n - 1 - idx))
    return (csum[idx + h + 1] - csum[idx - h]) / (2 * h + 1)


def estimate_novelty(cohort: Cohort, smooth_window: int = 5) -> NoveltyCurve:
    """Novelty curve from increments of the mean log count.

    ``M_t`` is the cross-story mean of ``log n(t)``; it is smoothed with a
    centred moving average before differencing, and the differences are
    divided by the first one so that ``r_1 = 1``.
    """
    if cohort.horizon < 1:
        raise EstimationError("cohort horizon must be >= 1")
    m = np.log(cohort.counts).mean(axis=0)
    m = centered_moving_average(m, smooth_window)
    d = np.diff(m)
    if d[0] == 0.0 or not np.isfinite(d[0]):
        raise EstimationError("no growth in the first minute; r_t is undefined")
    r = d / d[0]
    r[0] = 1.0
    return NoveltyCurve(r, estimated=True)
