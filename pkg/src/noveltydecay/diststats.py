"""Log-normal fitting, one-sample Kolmogorov-Smirnov test, normal Q-Q points."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import LogNormalFit, ModelError
from .special import norm_cdf, norm_ppf

MIN_FIT_SAMPLES = 8


class KSResult(NamedTuple):
    d: float
    p: float


def kolmogorov_sf(lam: float, tol: float = 1e-10) -> float:
    """P(K > lam) for the Kolmogorov distribution.

    For ``lam >= 1`` the alternating series ``2 sum (-1)^(k-1) exp(-2 k^2 lam^2)``
    is summed until a term drops below ``tol``.  Below 1 that series needs
    many nearly cancelling terms, so the equivalent theta-function form
    ``1 - sqrt(2 pi)/lam * sum exp(-(2k-1)^2 pi^2 / (8 lam^2))`` is used.
    """
    lam = float(lam)
    # 1 - p < 1e-40 below 0.1
    if lam < 0.1:
        return 1.0
    if lam < 1.0:
        c = math.pi**2 / (8.0 * lam * lam)
        acc = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * c)
            acc += term
            if term < tol * acc or term == 0.0:
                break
            k += 1
        p = 1.0 - math.sqrt(2.0 * math.pi) / lam * acc
    else:
        acc = 0.0
        k = 1
        while True:
            term = math.exp(-2.0 * k * k * lam * lam)
            acc += term if k % 2 else -term
            if term < tol:
                break
            k += 1
        p = 2.0 * acc
    return min(1.0, max(0.0, p))


def ks_statistic(values, dist_mean: float, dist_sd: float) -> float:
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    f = np.asarray(norm_cdf(x, dist_mean, dist_sd), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_test(values, dist_mean: float, dist_sd: float) -> KSResult:
    """One-sample KS test against Normal(dist_mean, dist_sd).

    The p-value uses the asymptotic Kolmogorov law at
    ``(sqrt(n) + 0.12 + 0.11/sqrt(n)) * d`` (Stephens' small-sample
    correction).
    """
    if not dist_sd > 0:
        raise ModelError("dist_sd must be > 0")
    values = np.asarray(values, dtype=float)
    if values.size < 1:
        raise ModelError("ks_test needs at least one value")
    d = ks_statistic(values, dist_mean, dist_sd)
    sn = math.sqrt(values.size)
    return KSResult(d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d))


def fit_lognormal(values) -> LogNormalFit:
    """Normal fit to ``log(values)`` plus a KS test against that fit.

    The KS p-value treats the fitted parameters as known, which makes it
    conservative (too high) relative to a Lilliefors test.
    """
    v = np.asarray(values, dtype=float)
    if v.size < MIN_FIT_SAMPLES:
        raise ModelError(f"need at least {MIN_FIT_SAMPLES} values, got {v.size}")
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise ModelError("values must be finite and > 0")
    logs = np.log(v)
    mu = float(logs.mean())
    sd = float(logs.std(ddof=1))
    if np.ptp(logs) == 0.0:
        raise ModelError("all values are equal; sigma_log would be 0")
    d, p = ks_test(logs, mu, sd)
    return LogNormalFit(mu, sd, d, p, int(v.size))


def qq_points(values) -> np.ndarray:
    """Normal Q-Q pairs ``(z_i, x_(i))`` with plotting positions ``(i - 0.5)/n``.

    Returns an (n, 2) array: theoretical quantile, sorted sample value.
    """
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if n < 2:
        raise ModelError("qq_points needs at least 2 values")
    z = np.array([norm_ppf((i - 0.5) / n) for i in range(1, n + 1)])
    # exact antisymmetry about the median plotting position
    half = n // 2
    z[n - half :] = -z[:half][::-1]
    if n % 2:
        z[half] = 0.0
    return np.column_stack([z, x])
