import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noveltydecay.core import GrowthParams, ModelError, NoveltyCurve, validate_trace
from noveltydecay.files import traces_csv
from noveltydecay.simulate import (
    ShockFamily,
    SimConfig,
    draw_shock,
    draw_shocks,
    gamma_shape_scale,
    lognormal_params,
    simulate_cohort,
    simulate_story,
    story_shocks,
)


def _config(**kw):
    base = dict(
        n_stories=20,
        horizon=30,
        growth=GrowthParams(0.05, 0.0072),
        novelty=NoveltyCurve.stretched_exponential(0.4, 0.4, 30),
        master_seed=3,
    )
    base.update(kw)
    return SimConfig(**base)


def test_constant_shock_is_mu():
    rng = np.random.default_rng(0)
    assert draw_shock(GrowthParams(0.05, 0.0), "constant", rng) == 0.05


def test_gamma_shape_scale_algebra():
    assert gamma_shape_scale(GrowthParams(2.0, 4.0)) == (1.0, 2.0)


def test_family_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ModelError):
        draw_shock(GrowthParams(0.05, 0.01), ShockFamily.CONSTANT, rng)
    with pytest.raises(ModelError):
        draw_shock(GrowthParams(0.05, 0.0), ShockFamily.GAMMA, rng)
    with pytest.raises(ModelError):
        GrowthParams(-0.05, 0.01)


@pytest.mark.parametrize("family", ["gamma", "lognormal"])
def test_shock_moments_million_draws(family):
    growth = GrowthParams(0.05, 0.0072)
    x = draw_shocks(growth, family, np.random.default_rng(17), 1_000_000)
    assert np.all(x > 0)
    sigma = math.sqrt(growth.sigma2)
    # mean within 3 standard errors
    assert abs(x.mean() - 0.05) < 3 * sigma / 1e3
    # variance: standard error sqrt((m4 - s^4)/n) estimated from the sample
    m4 = np.mean((x - x.mean()) ** 4)
    se_var = math.sqrt((m4 - x.var() ** 2) / x.size)
    assert abs(x.var(ddof=1) - growth.sigma2) < 4 * se_var


def test_exponential_case_matches_gamma_shape_one():
    # (mu=2, sigma2=4) is Exponential(mean 2): P(X > 2) = e^-1
    x = draw_shocks(GrowthParams(2.0, 4.0), "gamma", np.random.default_rng(5), 400_000)
    p = np.mean(x > 2.0)
    assert abs(p - math.exp(-1)) < 4 * math.sqrt(p * (1 - p) / x.size)


def test_lognormal_params_moments():
    m, s = lognormal_params(GrowthParams(0.05, 0.0072))
    assert math.exp(m + s * s / 2) == pytest.approx(0.05, rel=1e-14)
    assert (math.exp(s * s) - 1) * math.exp(2 * m + s * s) == pytest.approx(0.0072, rel=1e-12)


def test_story_closed_form_product():
    cfg = _config(
        n_stories=1,
        horizon=3,
        growth=GrowthParams(0.1, 0.0),
        novelty=NoveltyCurve([1.0, 0.5, 0.25]),
        n0=100.0,
        shock_family="constant",
    )
    tr = simulate_story(cfg, 0)
    np.testing.assert_allclose(tr.n, [100.0, 110.0, 115.5, 118.3875], rtol=1e-15)
    assert tr.t.tolist() == [0, 1, 2, 3]


def test_zero_discount_freezes_growth():
    r = np.zeros(10)
    r[0] = 1.0
    tr = simulate_story(_config(horizon=10, novelty=NoveltyCurve(r)), 4)
    assert np.all(tr.n[1:] == tr.n[1])
    assert tr.n[1] > tr.n[0]


def test_deterministic_log_increment_exact():
    cfg = _config(growth=GrowthParams(0.07, 0.0), shock_family="constant")
    tr = simulate_story(cfg, 0)
    r = cfg.novelty.r[:30]
    expected = np.cumsum(np.log1p(r * 0.07))
    np.testing.assert_allclose(np.log(tr.n[1:]) - np.log(tr.n[0]), expected, rtol=1e-13)


def test_small_step_approximation_per_path():
    cfg = _config(n_stories=50, horizon=120, novelty=NoveltyCurve.stretched_exponential(0.4, 0.4, 120),
                  growth=GrowthParams(0.05, 0.0072))
    r = cfg.novelty.r[:120]
    for i in range(cfg.n_stories):
        tr = simulate_story(cfg, i)
        x = story_shocks(cfg, i)
        lin = np.cumsum(r * x)
        exact = np.log(tr.n[1:]) - np.log(tr.n[0])
        # log(1+y) >= y - y^2/2, so the gap is at most max(r x)/2 of the sum
        bound = np.maximum.accumulate(r * x) / 2
        assert np.all(lin - exact >= -1e-12)
        assert np.all((lin - exact) <= bound * lin + 1e-12)


def test_small_step_bound_mu_relative():
    # shocks bounded by 2*mu (lognormal with small variance): relative gap <= mu
    cfg = _config(n_stories=30, horizon=200, growth=GrowthParams(0.05, 1e-5), shock_family="lognormal",
                  novelty=NoveltyCurve.stretched_exponential(0.4, 0.4, 200))
    r = cfg.novelty.r[:200]
    for i in range(cfg.n_stories):
        x = story_shocks(cfg, i)
        tr = simulate_story(cfg, i)
        lin = np.cumsum(r * x)
        exact = np.log(tr.n[1:]) - np.log(tr.n[0])
        assert np.all(np.abs(lin - exact) / lin <= cfg.growth.mu)


def test_mean_log_growth_matches_discounted_sum():
    horizon = 60
    cfg = SimConfig(
        n_stories=10_000,
        horizon=horizon,
        growth=GrowthParams(0.01, 0.0001),
        novelty=NoveltyCurve.stretched_exponential(0.4, 0.4, horizon),
        master_seed=99,
    )
    cohort = simulate_cohort(cfg)
    inc = cohort.log_increments()[:, -1]
    r = cfg.novelty.r[:horizon]
    # exact expectation uses E log(1 + r X); the linear term mu * sum r is its
    # first-order approximation, off by about (mu^2 + sigma2)/2 * sum r^2
    approx = 0.01 * r.sum()
    second = (0.01**2 + 0.0001) / 2 * (r**2).sum()
    se = inc.std(ddof=1) / math.sqrt(inc.size)
    assert abs(inc.mean() - (approx - second)) < 4 * se
    assert abs(inc.mean() / approx - 1) < 0.02


def test_traces_are_valid_and_positive(small_config):
    cohort = simulate_cohort(small_config)
    assert len(cohort) == 50
    for tr in cohort.traces:
        assert validate_trace(tr) == []
        assert np.all(tr.n > 0)


def test_cohort_determinism_and_seed_sensitivity():
    a = simulate_cohort(_config())
    b = simulate_cohort(_config())
    c = simulate_cohort(_config(master_seed=4))
    assert traces_csv(a) == traces_csv(b)
    assert traces_csv(a) != traces_csv(c)


def test_parallel_matches_serial():
    cfg = _config(n_stories=37)
    assert traces_csv(simulate_cohort(cfg, workers=3)) == traces_csv(simulate_cohort(cfg))


def test_single_story_cohort_matches_simulate_story():
    cfg = _config(n_stories=1)
    assert simulate_cohort(cfg).traces[0] == simulate_story(cfg, 0)


def test_story_independent_of_cohort_size():
    big = simulate_cohort(_config(n_stories=30))
    small = simulate_cohort(_config(n_stories=5))
    assert big.traces[:5] == small.traces


def test_per_story_n0():
    cfg = _config(n_stories=3, n0=[10.0, 20.0, 30.0])
    cohort = simulate_cohort(cfg)
    assert cohort.counts[:, 0].tolist() == [10.0, 20.0, 30.0]
    with pytest.raises(ModelError):
        _config(n_stories=3, n0=[10.0, 20.0])
    with pytest.raises(ModelError):
        _config(n0=0.0)


def test_config_validation():
    with pytest.raises(ModelError):
        _config(novelty=NoveltyCurve.stretched_exponential(0.4, 0.4, 10))
    with pytest.raises(ModelError):
        _config(novelty=NoveltyCurve([1.0] * 30, estimated=True))
    with pytest.raises(ModelError):
        _config(horizon=0)


@settings(max_examples=25)
@given(
    st.floats(0.001, 0.5),
    st.floats(0.0, 2.0),
    st.sampled_from(["gamma", "lognormal"]),
    st.integers(0, 2**63),
)
def test_random_configs_yield_valid_traces(mu, cv, family, seed):
    sigma2 = (cv * mu) ** 2
    if sigma2 == 0:
        family = "constant"
    cfg = _config(growth=GrowthParams(mu, sigma2), shock_family=family, master_seed=seed, n_stories=3)
    for tr in simulate_cohort(cfg).traces:
        assert validate_trace(tr) == []
