"""Scalar quadrature, root bracketing and 1-d minimisation."""

from __future__ import annotations

import heapq
import math
from typing import Callable

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


class ConvergenceError(RuntimeError):
    pass


def gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 15-point panel; returns (integral, error estimate)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    kron = fc * _WGK[7]
    gauss = fc * _WG[3]
    for j in range(7):
        dx = h * _XGK[j]
        pair = f(c - dx) + f(c + dx)
        kron += _WGK[j] * pair
        if j % 2 == 1:
            gauss += _WG[j // 2] * pair
    return kron * h, abs((kron - gauss) * h)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    max_panels: int = 5000,
) -> tuple[float, float]:
    """Globally adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    The panel with the largest error estimate is bisected until the summed
    estimate falls below ``max(abs_tol, rel_tol * |integral|)``.
    Returns ``(integral, error_estimate)``.
    """
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    val, err = gk15(f, a, b)
    heap = [(-err, a, b, val)]
    total, total_err = val, err
    while total_err > max(abs_tol, rel_tol * abs(total)):
        if len(heap) >= max_panels:
            raise ConvergenceError(
                f"quadrature did not converge on [{a}, {b}] (error {total_err:.3g})"
            )
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            raise ConvergenceError(f"panel [{lo}, {hi}] cannot be split further")
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        if total_err < 0:
            total_err = sum(-p[0] for p in heap)
    # re-sum to shed accumulated cancellation from the running updates
    total = math.fsum(p[3] for p in heap)
    return sign * total, total_err


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    max_iter: int = 500,
) -> float:
    """Root of ``f`` in ``[lo, hi]`` by bisection; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= max(abs_tol, rel_tol * abs(mid)):
            return mid
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise ConvergenceError("bisection exceeded max_iter")


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-4
) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``.

    The bracket is shrunk until narrower than ``tol``; the best point seen
    (endpoints included) is returned.
    """
    seen = {lo: f(lo), hi: f(hi)}
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    seen[x1], seen[x2] = f1, f2
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
            seen[x1] = f1
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
            seen[x2] = f2
    x = min(seen, key=seen.get)
    return x, seen[x]
