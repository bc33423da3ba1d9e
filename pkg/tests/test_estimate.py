import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noveltydecay.core import Cohort, GrowthParams, MeanVarSeries, NoveltyCurve, StoryTrace
from noveltydecay.estimate import (
    EstimationError,
    centered_moving_average,
    estimate_growth_ratio,
    estimate_novelty,
    mean_variance_series,
)
from noveltydecay.simulate import SimConfig, simulate_cohort


def _cohort(rows):
    rows = np.asarray(rows, dtype=float)
    traces = [StoryTrace(f"s{i}", np.arange(rows.shape[1]), row) for i, row in enumerate(rows)]
    return Cohort(tuple(traces), rows.shape[1] - 1)


def _series(x, y):
    return MeanVarSeries(np.arange(1, len(x) + 1), y, x)


def test_mean_variance_two_traces_hand_arithmetic():
    c = _cohort([[1.0, np.exp(0.5)], [1.0, np.exp(1.5)]])
    s = mean_variance_series(c)
    assert s.mean[0] == pytest.approx(1.0, abs=1e-15)
    assert s.variance[0] == pytest.approx(0.5, abs=1e-15)
    assert s.t.tolist() == [1]


def test_identical_traces_zero_variance():
    s = mean_variance_series(_cohort([[2.0, 3.0, 5.0]] * 4))
    assert np.all(s.variance == 0)
    with pytest.raises(EstimationError, match="deterministic cohort"):
        estimate_growth_ratio(s)


def test_mean_variance_needs_two_traces():
    with pytest.raises(EstimationError):
        mean_variance_series(_cohort([[1.0, 2.0]]))


def test_deterministic_simulation_series():
    cfg = SimConfig(5, 40, GrowthParams(0.05, 0.0), NoveltyCurve.stretched_exponential(0.4, 0.4, 40),
                    master_seed=1, shock_family="constant")
    s = mean_variance_series(simulate_cohort(cfg))
    np.testing.assert_array_equal(s.variance, 0.0)
    np.testing.assert_allclose(s.mean, np.cumsum(np.log1p(cfg.novelty.r * 0.05)), rtol=1e-13)


def test_growth_ratio_exact_line():
    fit = estimate_growth_ratio(_series([1, 2, 3], [7, 14, 21]))
    assert fit.slope == pytest.approx(7.0, abs=1e-14)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-14)


def test_growth_ratio_symmetric_residuals():
    # two points at x = 1 need distinct t; MeanVarSeries only requires distinct t
    fit = estimate_growth_ratio(MeanVarSeries([1, 2], [6.0, 8.0], [1.0, 1.0]))
    assert fit.slope == 7.0
    assert fit.residual_rms == 1.0


def test_growth_ratio_needs_two_points():
    with pytest.raises(EstimationError):
        estimate_growth_ratio(_series([1.0], [1.0]))


@settings(max_examples=30)
@given(st.floats(0.01, 100.0), st.integers(0, 2**32))
def test_growth_ratio_scale_invariant(c, seed):
    rng = np.random.default_rng(seed)
    counts = np.cumprod(1 + rng.gamma(0.5, 0.1, size=(6, 9)), axis=1)
    a = mean_variance_series(_cohort(counts))
    b = mean_variance_series(_cohort(counts * c))
    np.testing.assert_allclose(b.mean, a.mean, atol=1e-12)
    np.testing.assert_allclose(b.variance, a.variance, atol=1e-12)
    assert estimate_growth_ratio(b).slope == pytest.approx(estimate_growth_ratio(a).slope, rel=1e-9)


@settings(max_examples=30)
@given(st.integers(0, 2**32), st.permutations(range(7)))
def test_estimators_ignore_story_order(seed, perm):
    rng = np.random.default_rng(seed)
    counts = np.cumprod(1 + rng.gamma(0.5, 0.1, size=(7, 12)), axis=1)
    a, b = _cohort(counts), _cohort(counts[list(perm)])
    sa, sb = mean_variance_series(a), mean_variance_series(b)
    np.testing.assert_allclose(sa.mean, sb.mean, rtol=1e-12)
    np.testing.assert_allclose(sa.variance, sb.variance, rtol=1e-10, atol=1e-15)
    np.testing.assert_allclose(estimate_novelty(a, 3).r, estimate_novelty(b, 3).r, rtol=1e-9, atol=1e-12)


def test_novelty_direct_differencing():
    # one story with log n = M gives the cross-story mean M exactly
    m = np.array([0.0, 1.0, 1.5, 1.75])
    r = estimate_novelty(_cohort([np.exp(m)]), smooth_window=1).r
    np.testing.assert_allclose(r, [1.0, 0.5, 0.25], rtol=1e-14)


def test_novelty_deterministic_formula():
    mu = 0.02
    cfg = SimConfig(3, 50, GrowthParams(mu, 0.0), NoveltyCurve.stretched_exponential(0.4, 0.4, 50),
                    master_seed=1, shock_family="constant")
    r_hat = estimate_novelty(simulate_cohort(cfg), smooth_window=1).r
    r = cfg.novelty.r
    np.testing.assert_allclose(r_hat, np.log1p(r * mu) / np.log1p(mu), rtol=1e-10)
    assert np.max(np.abs(r_hat - r)) < mu


def test_novelty_first_value_exactly_one_after_smoothing():
    rng = np.random.default_rng(4)
    counts = np.cumprod(1 + rng.gamma(0.3, 0.2, size=(20, 40)), axis=1)
    for w in (1, 3, 5, 9):
        assert estimate_novelty(_cohort(counts), w).r[0] == 1.0


def test_novelty_telescoping_identity():
    rng = np.random.default_rng(8)
    counts = 50 * np.cumprod(1 + rng.gamma(0.3, 0.2, size=(15, 30)), axis=1)
    c = _cohort(counts)
    m = np.log(c.counts).mean(axis=0)
    r = estimate_novelty(c, 1).r
    np.testing.assert_allclose(np.cumsum(r) * (m[1] - m[0]), m[1:] - m[0], rtol=1e-12)


def test_novelty_zero_first_step():
    with pytest.raises(EstimationError):
        estimate_novelty(_cohort([[1.0, 1.0, 2.0], [3.0, 3.0, 4.0]]), 1)


def test_moving_average_edges_and_linear_trend():
    v = np.arange(10.0) * 3 + 2
    np.testing.assert_allclose(centered_moving_average(v, 5), v)
    out = centered_moving_average(np.array([0.0, 0.0, 9.0, 0.0, 0.0]), 3)
    np.testing.assert_allclose(out, [0.0, 3.0, 3.0, 3.0, 0.0])
    with pytest.raises(ValueError):
        centered_moving_average(v, 4)


def test_novelty_roundtrip_small():
    horizon = 200
    cfg = SimConfig(2000, horizon, GrowthParams(0.05, 0.0072),
                    NoveltyCurve.stretched_exponential(0.4, 0.4, horizon), master_seed=5)
    r_hat = estimate_novelty(simulate_cohort(cfg), 5).r[:180]
    rmse = np.sqrt(np.mean((r_hat - cfg.novelty.r[:180]) ** 2))
    assert rmse < 0.05
