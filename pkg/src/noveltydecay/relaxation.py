"""Stretched-exponential (KWW) fits to novelty curves and attention half-life."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import KwwParams, ModelError, NoveltyCurve
from .numerics import bisect, golden_section, integrate
from .special import gamma

B_GRID = np.round(np.arange(1, 21) * 0.05, 2)
MIN_FIT_POINTS = 5


class FitError(ModelError):
    pass


class NotDecayingError(FitError):
    """The best fit has a non-positive rate, i.e. the curve does not decay."""


class KwwFit(NamedTuple):
    params: KwwParams
    sse: float
    n_used: int
    n_excluded: int


def _profile(t: np.ndarray, log_r: np.ndarray, b: float) -> tuple[float, float, float]:
    """OLS of log r on t**b; returns (sse, intercept, slope)."""
    x = t**b
    xm, ym = x.mean(), log_r.mean()
    dx = x - xm
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        return math.inf, ym, 0.0
    slope = float(np.dot(dx, log_r - ym)) / sxx
    intercept = ym - slope * xm
    resid = log_r - intercept - slope * x
    return float(np.dot(resid, resid)), intercept, slope


def fit_kww(
    curve, t_min: int = 1, t_max: int | None = None, b_tol: float = 1e-9
) -> KwwFit:
    """Fit ``log r_t = log c - a t**b`` over ``t_min <= t <= t_max``.

    ``b`` is picked from the grid 0.05, 0.10, ..., 1.00 and then refined by
    golden-section search within +-0.05 of the best grid value; for each
    ``b`` the intercept and slope come from ordinary least squares.
    Non-positive ``r_t`` are left out and counted in ``n_excluded``.

    ``curve`` is a :class:`NoveltyCurve` or any sequence of ``r_1, r_2, ...``
    (unnormalised input is fine; the constant is absorbed by ``c``).
    """
    values = curve.r if isinstance(curve, NoveltyCurve) else np.asarray(curve, dtype=float)
    if t_max is None:
        t_max = values.size
    if not 1 <= t_min <= t_max <= values.size:
        raise FitError(f"fit window [{t_min}, {t_max}] outside curve 1..{values.size}")
    t = np.arange(t_min, t_max + 1, dtype=float)
    r = values[t_min - 1 : t_max]
    keep = r > 0
    n_used = int(keep.sum())
    if n_used < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} positive values, got {n_used}")
    t, log_r = t[keep], np.log(r[keep])

    def sse(b):
        return _profile(t, log_r, b)[0]

    grid_sse = [sse(b) for b in B_GRID]
    b_star = float(B_GRID[int(np.argmin(grid_sse))])
    lo, hi = max(b_star - 0.05, 0.01), min(b_star + 0.05, 1.0)
    b_best, _ = golden_section(sse, lo, hi, tol=b_tol)
    if sse(b_star) < sse(b_best):
        b_best = b_star

    err, intercept, slope = _profile(t, log_r, b_best)
    if not slope < 0:
        raise NotDecayingError(f"fitted rate a={-slope:.4g} is not positive")
    params = KwwParams(c=math.exp(intercept), a=-slope, b=b_best)
    return KwwFit(params, err, n_used, int(keep.size - n_used))


def _check_domain(a: float, b: float) -> None:
    if not (a > 0 and math.isfinite(a)):
        raise ModelError(f"a must be > 0, got {a!r}")
    if not 0 < b <= 1:
        raise ModelError(f"b must lie in (0, 1], got {b!r}")


def kww_total_integral(a: float, b: float) -> float:
    """Closed form of the integral of exp(-a t**b) over [0, inf): Gamma(1/b + 1) / a**(1/b)."""
    _check_domain(a, b)
    return gamma(1.0 / b + 1.0) / a ** (1.0 / b)


def kww_partial_integral(a: float, b: float, upper: float, rel_tol: float = 1e-10) -> float:
    """Integral of exp(-a t**b) over [0, upper].

    Computed in the variable ``u = t**b`` as ``(1/b) * int u**(1/b - 1) e**(-a u) du``,
    which removes the unbounded slope of the integrand at ``t = 0``.
    """
    _check_domain(a, b)
    if upper < 0:
        raise ModelError("upper limit must be >= 0")
    if upper == 0:
        return 0.0
    p = 1.0 / b - 1.0
    if p == 0.0:
        return -math.expm1(-a * upper) / a

    def f(u):
        return u**p * math.exp(-a * u)

    val, _ = integrate(f, 0.0, upper**b, rel_tol=rel_tol)
    return val / b


def kww_tail_cutoff(a: float, b: float, tail: float = 1e-10) -> float:
    """Upper limit T with the integral beyond T below ``tail`` times the total."""
    _check_domain(a, b)
    s = 1.0 / b
    # In x = a t**b the tail is Q(s, x); for x > s the integrand bound
    # x**(s-1) e**-x / Gamma(s) * x / (x - s + 1) majorises it.
    x = s + 1.0
    log_gs = math.lgamma(s)
    while True:
        bound = (s - 1.0) * math.log(x) - x - log_gs + math.log(x / (x - s + 1.0))
        if bound < math.log(tail):
            break
        x *= 1.25
    return (x / a) ** s


def half_life(a: float, b: float, rel_tol: float = 1e-6) -> float:
    """Time by which half of the total area under exp(-a t**b) has accrued.

    Bisection on ``tau`` against adaptive quadrature of the partial integral.
    """
    _check_domain(a, b)
    target = 0.5 * kww_total_integral(a, b)

    def excess(tau):
        return kww_partial_integral(a, b, tau, rel_tol=1e-10) - target

    hi = a ** (-1.0 / b)
    while excess(hi) < 0:
        hi *= 2.0
    lo = 0.0
    return bisect(excess, lo, hi, rel_tol=rel_tol * 1e-2)


class DecaySeries(NamedTuple):
    t: np.ndarray
    log_t: np.ndarray
    t_pow_b: np.ndarray
    log_r: np.ndarray


def decay_series(curve: NoveltyCurve, b: float) -> DecaySeries:
    """Plot-ready transforms of the positive part of a curve: t, log t, t**b against log r."""
    t = curve.t.astype(float)
    keep = curve.r > 0
    t = t[keep]
    return DecaySeries(t, np.log(t), t**b, np.log(curve.r[keep]))
