import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from respgraph.errors import (DegenerateSupport, InsufficientData, LengthMismatch, NonPositiveSample,
                              NonPositiveVariance, ZeroVariance)
from respgraph.statfit import (ccdf, discrete_power_law_sf, fit_power_law, fit_weibull, pearson,
                               sample_discrete_power_law, weibull_log_likelihood)


def weibull_samples(rng, shape, scale, n):
    # inverse CDF: F(x) = 1 - exp(-(x/scale)**shape)
    return scale * (-np.log1p(-rng.random(n))) ** (1.0 / shape)


# ---- power law ------------------------------------------------------------ #
def test_mle_recovers_alpha_2_5():
    x = sample_discrete_power_law(np.random.default_rng(0), 2.5, 100_000, x_max=10**6)
    fit = fit_power_law(x)
    assert 2.45 <= fit.alpha <= 2.55
    assert fit.method == "mle_discrete"
    assert 0 <= fit.r_squared <= 1


def test_sampler_matches_pmf():
    rng = np.random.default_rng(1)
    x = sample_discrete_power_law(rng, 2.0, 200_000, x_max=50)
    pmf = np.arange(1, 51, dtype=float) ** -2.0
    pmf /= pmf.sum()
    freq = np.bincount(x, minlength=51)[1:] / x.size
    assert np.abs(freq - pmf).max() < 0.005


def test_truncated_mle_handles_alpha_below_one():
    x = sample_discrete_power_law(np.random.default_rng(2), 0.7, 100_000, x_max=1000)
    fit = fit_power_law(x, x_max=1000)
    assert abs(fit.alpha - 0.7) < 0.05


def test_untruncated_law_needs_alpha_above_one():
    with pytest.raises(ValueError):
        discrete_power_law_sf(np.array([1.0]), 0.9)


def test_all_equal_is_degenerate():
    with pytest.raises(DegenerateSupport):
        fit_power_law([4] * 50)


def test_too_few_samples():
    with pytest.raises(InsufficientData):
        fit_power_law([1, 2, 3])
    with pytest.raises(InsufficientData):
        fit_power_law([1] * 5 + [100] * 8, x_min=50)


def test_rejects_non_integers_and_values_above_cap():
    with pytest.raises(ValueError):
        fit_power_law([1.5] * 20)
    with pytest.raises(ValueError):
        fit_power_law(list(range(1, 30)), x_max=10)


def test_geometric_tail_fits_worse_than_power_law():
    rng = np.random.default_rng(3)
    pl = fit_power_law(sample_discrete_power_law(rng, 2.0, 20_000, x_max=10**5), method="loglog_ls")
    geo = fit_power_law(rng.geometric(0.05, 20_000), method="loglog_ls")
    assert geo.r_squared < pl.r_squared - 0.1


def test_loglog_slope_on_clean_data():
    x = sample_discrete_power_law(np.random.default_rng(4), 2.5, 100_000, x_max=10**5)
    fit = fit_power_law(x, method="loglog_ls")
    assert abs(fit.alpha - 2.5) < 0.15
    assert fit.r_squared > 0.98
    assert fit.log_likelihood is None


def test_x_min_restricts_to_the_tail():
    rng = np.random.default_rng(5)
    x = sample_discrete_power_law(rng, 2.5, 100_000, x_min=5, x_max=10**5)
    noise = rng.integers(1, 5, 50_000)
    fit = fit_power_law(np.concatenate([x, noise]), x_min=5)
    assert fit.n == x.size
    assert abs(fit.alpha - 2.5) < 0.05


def test_tail_probability_matches_zeta_ratio():
    fit = fit_power_law(sample_discrete_power_law(np.random.default_rng(6), 2.2, 5000))
    s = fit.tail_probability([1, 3, 10])
    expect = special.zeta(fit.alpha, np.array([1, 3, 10])) / special.zeta(fit.alpha, 1)
    assert np.allclose(s, expect, rtol=1e-12)
    assert discrete_power_law_sf(np.array([11.0]), 2.0, 1, 10)[0] == 0.0


def test_power_law_record():
    rec = fit_power_law(sample_discrete_power_law(np.random.default_rng(7), 2.0, 1000)).as_record()
    assert set(rec) == {"model", "params", "gof", "n", "method"}
    assert rec["model"] == "power_law"


# ---- Weibull ------------------------------------------------------------ #
def test_exponential_data_gives_shape_one():
    x = np.random.default_rng(8).exponential(1.0, 100_000)
    assert 0.98 <= fit_weibull(x).shape <= 1.02


def test_weibull_shape_1_35():
    fit = fit_weibull(weibull_samples(np.random.default_rng(9), 1.35, 300.0, 100_000))
    assert 1.32 <= fit.shape <= 1.38
    assert abs(fit.scale - 300.0) / 300.0 < 0.02


def test_weibull_gradient_vanishes_at_optimum():
    x = weibull_samples(np.random.default_rng(10), 1.15, 200.0, 50_000)
    fit = fit_weibull(x)
    h = 1e-5
    for f in (lambda d: weibull_log_likelihood(x, fit.shape + d, fit.scale, mean=True),
              lambda d: weibull_log_likelihood(x, fit.shape, fit.scale * (1 + d), mean=True)):
        grad = (f(h) - f(-h)) / (2 * h)
        assert abs(grad) < 1e-6


def test_weibull_matches_scipy_reference():
    from scipy import stats
    x = weibull_samples(np.random.default_rng(11), 0.8, 5.0, 2000)
    shape, _, scale = stats.weibull_min.fit(x, floc=0)
    fit = fit_weibull(x)
    assert fit.shape == pytest.approx(shape, rel=1e-4)
    assert fit.scale == pytest.approx(scale, rel=1e-4)


def test_weibull_errors():
    with pytest.raises(NonPositiveVariance):
        fit_weibull([3.0] * 20)
    with pytest.raises(NonPositiveSample):
        fit_weibull([1.0] * 19 + [0.0])
    with pytest.raises(InsufficientData):
        fit_weibull([1.0, 2.0])


# ---- pearson ------------------------------------------------------------ #
def test_pearson_perfect_lines():
    xs = np.arange(10.0)
    assert pearson(xs, 2 * xs + 1).coefficient == pytest.approx(1.0)
    assert pearson(xs, -xs).coefficient == pytest.approx(-1.0)


def test_pearson_direct_formula():
    rng = np.random.default_rng(12)
    xs, ys = rng.normal(size=20).tolist(), rng.normal(size=20).tolist()
    mx, my = sum(xs) / 20, sum(ys) / 20
    num = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    den = math.sqrt(sum((a - mx) ** 2 for a in xs) * sum((b - my) ** 2 for b in ys))
    res = pearson(xs, ys)
    assert res.coefficient == pytest.approx(num / den, abs=1e-12)
    assert res.n == 20


def test_pearson_errors():
    with pytest.raises(LengthMismatch):
        pearson([1, 2, 3], [1, 2])
    with pytest.raises(ZeroVariance):
        pearson([1, 2, 3], [5, 5, 5])
    with pytest.raises(InsufficientData):
        pearson([1], [2])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=3, max_size=30),
       st.floats(0.1, 10), st.floats(-10, 10))
def test_pearson_affine_invariance(pairs, a, b):
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    if np.ptp(xs) < 1e-3 or np.ptp(ys) < 1e-3:
        return
    c = pearson(xs, ys).coefficient
    assert pearson(a * xs + b, ys).coefficient == pytest.approx(c, abs=1e-9)
    assert pearson(-a * xs + b, ys).coefficient == pytest.approx(-c, abs=1e-9)


# ---- ccdf ------------------------------------------------------------ #
def test_ccdf_hand_count():
    pts = ccdf([1, 2, 3])
    assert pts[0] == (1.0, 1.0)
    assert pts[1][1] == pytest.approx(2 / 3)
    assert pts[2][1] == pytest.approx(1 / 3)
    assert ccdf([7, 7, 7]) == [(7.0, 1.0)]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=60))
def test_ccdf_counting_oracle(xs):
    pts = ccdf(xs)
    assert [v for v, _ in pts] == sorted(set(xs))
    for v, f in pts:
        assert f == sum(1 for x in xs if x >= v) / len(xs)
    fr = [f for _, f in pts]
    assert fr[0] == 1.0
    assert all(a >= b for a, b in zip(fr, fr[1:]))


def test_ccdf_empty():
    with pytest.raises(InsufficientData):
        ccdf([])
