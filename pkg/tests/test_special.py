import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noveltydecay.special import gamma, norm_cdf, norm_ppf

mp.mp.dps = 50


def _ppf_oracle(p: float) -> float:
    """Quantile by high-precision root finding on the normal CDF."""
    p = mp.mpf(p)
    if p < 0.5:
        f = lambda z: mp.ncdf(z) - p  # noqa: E731
    else:
        f = lambda z: (1 - p) - mp.ncdf(-z)  # noqa: E731
    return float(mp.findroot(f, norm_ppf(float(p))))


def test_gamma_relative_error_on_1_to_25():
    xs = np.linspace(1.0, 25.0, 961)
    worst = max(abs(gamma(x) / float(mp.gamma(x)) - 1) for x in xs)
    assert worst < 1e-10


@pytest.mark.parametrize("n", range(1, 12))
def test_gamma_integers(n):
    assert gamma(n) == pytest.approx(math.factorial(n - 1), rel=1e-13)


def test_gamma_half_and_reflection():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(3.5) == pytest.approx(15 * math.sqrt(math.pi) / 8, rel=1e-14)
    assert gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-13)
    with pytest.raises(ValueError):
        gamma(-2.0)


def test_norm_cdf_absolute_error():
    xs = np.linspace(-9, 9, 721)
    worst = max(abs(norm_cdf(x) - float(mp.ncdf(x))) for x in xs)
    assert worst < 1e-7
    np.testing.assert_allclose(norm_cdf(xs), [norm_cdf(x) for x in xs], rtol=0, atol=0)


def test_norm_cdf_shift_scale():
    assert norm_cdf(3.0, 1.0, 2.0) == pytest.approx(float(mp.ncdf(1.0)), abs=1e-15)
    with pytest.raises(ValueError):
        norm_cdf(0.0, 0.0, 0.0)


def test_norm_ppf_known_values():
    assert norm_ppf(0.5) == 0.0
    # 0.674489750196081743202227014541... (high-precision reference)
    assert norm_ppf(0.75) == pytest.approx(0.6744897501960817, abs=1e-15)
    assert norm_ppf(0.975) == pytest.approx(1.959963984540054, abs=1e-14)
    assert norm_ppf(0.0) == -math.inf and norm_ppf(1.0) == math.inf
    with pytest.raises(ValueError):
        norm_ppf(1.5)


def test_norm_ppf_absolute_error_over_range():
    ps = list(np.logspace(-300, -1, 120)) + list(np.linspace(0.01, 0.99, 99))
    ps += [1 - x for x in np.logspace(-15, -2, 20)]
    worst = max(abs(norm_ppf(p) - _ppf_oracle(p)) for p in ps)
    assert worst < 1e-8


# 1 - p carries ~1e-16 absolute error, so stay where dz/dp is moderate
@given(st.floats(1e-6, 0.5))
def test_norm_ppf_antisymmetric(p):
    assert norm_ppf(p) == pytest.approx(-norm_ppf(1 - p), abs=1e-9)


@given(st.floats(-5, 5))
def test_norm_ppf_inverts_cdf(z):
    assert norm_ppf(norm_cdf(z)) == pytest.approx(z, abs=1e-8)
