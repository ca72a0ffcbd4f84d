import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forumcast.models import (
    AllPredictorsDegenerate,
    ARFit,
    WindowTooShort,
    ar_forecast,
    fit_ar_bic,
    fit_bridge_gf,
    fit_bridge_oth_gf,
    fit_fabm_gf,
    fit_faar,
    fit_pls,
    simpls,
)
from forumcast.models.design import ols
from forumcast.models.factor import _base_matrices
from forumcast.models.pls import retained_count


def ar_series(phi, n, seed, burn=200):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n + burn)
    y = np.zeros(n + burn)
    for t in range(len(phi), n + burn):
        y[t] = sum(f * y[t - 1 - i] for i, f in enumerate(phi)) + e[t]
    return y[burn:]


def hand_fit(p, phi, intercept=0.0):
    return ARFit(p=p, phi=np.asarray(phi, float), intercept=intercept, residuals=np.zeros(1),
                 sigma2=1.0, bic=0.0, h=1, design=None)


# AR

def test_white_noise_selects_short_order():
    hits = 0
    for seed in range(50):
        fit = fit_ar_bic(np.random.default_rng(seed).standard_normal(300), 1)
        hits += fit.p == 1 and abs(fit.phi[0]) < 0.15
    assert hits >= 45


def test_ar2_recovery():
    fit = fit_ar_bic(ar_series((0.5, -0.3), 500, seed=1), 1)
    assert fit.p == 2
    np.testing.assert_allclose(fit.phi, [0.5, -0.3], atol=0.1)


def test_h1_direct_form_is_one_step_regression():
    y = ar_series((0.6,), 120, seed=2)
    fit = fit_ar_bic(y, 1, p_max=3)
    rows = np.arange(fit.design.start, len(y))
    x = np.column_stack([np.ones(len(rows))] + [y[rows - 1 - i] for i in range(fit.p)])
    coef, _ = ols(y[rows], x)
    np.testing.assert_allclose(np.r_[fit.intercept, fit.phi], coef, atol=1e-10)


def test_direct_multi_step_uses_h_lag():
    y = ar_series((0.8,), 400, seed=3)
    fit = fit_ar_bic(y, 3, p_max=2)
    # the three-step projection of an AR(1) has slope phi^3
    assert fit.phi[0] == pytest.approx(0.8**3, abs=0.1)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_p_max_honoured(seed):
    fit = fit_ar_bic(ar_series((0.9, -0.2), 80, seed), 1, p_max=13)
    assert 1 <= fit.p <= 13


def test_window_too_short():
    with pytest.raises(WindowTooShort):
        fit_ar_bic(np.arange(20.0), 1, p_max=13)


def test_ar_forecast_examples():
    assert ar_forecast(hand_fit(2, [0.3, 0.1]), np.zeros(5)) == 0.0
    assert ar_forecast(hand_fit(1, [0.5]), [1.0, 4.0]) == 2.0
    fit = hand_fit(3, [0.5, -0.25, 0.125], intercept=1.0)
    recent = np.array([9.0, 2.0, 4.0, 8.0])
    assert ar_forecast(fit, recent) == pytest.approx(1 + 0.5 * 8 - 0.25 * 4 + 0.125 * 2)
    with pytest.raises(ValueError):
        ar_forecast(fit, [1.0])


def test_fit_forecast_matches_origin_row():
    y = ar_series((0.5, -0.3), 100, seed=4)
    fit = fit_ar_bic(y, 1)
    assert fit.forecast() == pytest.approx(ar_forecast(fit, y))


# bridge

def test_zero_gf_reduces_to_ar():
    y = ar_series((0.5,), 80, seed=5)
    ar = fit_ar_bic(y, 1, reach=13)
    bridge = fit_bridge_gf(y, np.zeros(80), 1)
    assert bridge.p == ar.p
    assert bridge.forecast() == pytest.approx(ar.forecast(), abs=1e-10)
    assert np.all(bridge.gamma == 0)


def test_gamma_recovery():
    rng = np.random.default_rng(6)
    gf = rng.standard_normal(400)
    y = np.r_[0.0, 0.5 * gf[:-1]] + 0.3 * rng.standard_normal(400)
    fit = fit_bridge_gf(y, gf, 1, gf_first_lag=0)
    assert fit.gamma[0] == pytest.approx(0.5, abs=0.1)
    assert fit.q <= 13


def test_bridge_gf_first_lag_flag():
    rng = np.random.default_rng(7)
    gf = rng.standard_normal(200)
    y = rng.standard_normal(200)
    fit = fit_bridge_gf(y, gf, 1, q_max=4, gf_first_lag=1)
    assert 1 <= fit.q <= 4 and len(fit.gamma) == fit.q


def _oth_inputs(seed, n=120):
    rng = np.random.default_rng(seed)
    gf = rng.standard_normal(n)
    y = np.r_[0.0, 0.4 * gf[:-1]] + rng.standard_normal(n)
    simple = rng.standard_normal((n, 3))
    return y, gf, simple


def test_oth_zero_metrics_equal_bridge():
    y, gf, _ = _oth_inputs(8)
    oth = fit_bridge_oth_gf(y, gf, np.zeros((120, 3)), 1)
    bridge = fit_bridge_gf(y, gf, 1)
    assert (oth.p, oth.q) == (bridge.p, bridge.q)
    assert oth.forecast() == pytest.approx(bridge.forecast(), abs=1e-10)


def test_oth_coefficients_match_hand_ols():
    y, gf, simple = _oth_inputs(9)
    fit = fit_bridge_oth_gf(y, gf, simple, 1)
    assert len(fit.coef) == fit.p + (fit.q + 1) + 3 + 1
    x = fit.design.matrix(fit.p, fit.q)
    coef, _ = ols(fit.design.y, x)
    np.testing.assert_allclose(fit.coef, coef, atol=1e-10)


def test_oth_shape_check():
    y, gf, simple = _oth_inputs(10)
    with pytest.raises(ValueError):
        fit_bridge_oth_gf(y, gf, simple[:, :2], 1)


# PLS

def _centred(seed, n=40, m=5, rank=None):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, m))
    if rank is not None:
        x = rng.standard_normal((n, rank)) @ rng.standard_normal((rank, m))
    x -= x.mean(axis=0)
    y = x @ rng.standard_normal(m) + rng.standard_normal(n)
    return x, y - y.mean()


def test_rank_bound():
    x, y = _centred(0, m=6, rank=2)
    fs = fit_pls(y, x, r_max=10, threshold=0.0)
    assert fs.R <= 2 and simpls(x, y).weights.shape[1] <= 2


@pytest.mark.parametrize("seed", range(5))
def test_first_weight_parallel_to_cross_product(seed):
    x, y = _centred(seed)
    w = simpls(x, y).weights[:, 0]
    s = x.T @ y
    assert w @ s / (np.linalg.norm(w) * np.linalg.norm(s)) > 1 - 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_scores_orthonormal_and_shares_non_increasing(seed):
    x, y = _centred(seed, m=8)
    res = simpls(x, y)
    np.testing.assert_allclose(res.scores.T @ res.scores, np.eye(res.scores.shape[1]),
                               atol=1e-8)
    shares = fit_pls(y, x).explained_cov_share
    assert shares.sum() == pytest.approx(1.0)
    assert np.all(np.diff(shares) <= 1e-12)


@pytest.mark.parametrize("shares,r_max,expected", [
    ([0.1, 0.05], 10, 1),
    ([0.5, 0.3, 0.2], 10, 3),
    ([0.5, 0.3, 0.2], 2, 2),
    ([0.6, 0.1, 0.3], 10, 1),
])
def test_retained_count(shares, r_max, expected):
    assert retained_count(np.array(shares), r_max, 0.2) == expected


def test_r_max_honoured():
    x, y = _centred(1, m=8)
    assert fit_pls(y, x, r_max=1, threshold=0.0).R == 1


def test_degenerate_column_dropped():
    x, y = _centred(2)
    x[:, 3] = 0.0
    fs = fit_pls(y, x)
    assert fs.dropped == ["x3"] and np.all(fs.weights[3] == 0)


def test_all_degenerate_raises():
    with pytest.raises(AllPredictorsDegenerate):
        fit_pls(np.ones(10), np.zeros((10, 3)))


# factor models

def test_factors_orthogonal_to_base():
    y, gf, _ = _oth_inputs(11)
    x = np.random.default_rng(11).standard_normal((120, 6)).cumsum(axis=0)
    for fit in (fit_faar(y, x, 1), fit_fabm_gf(y, gf, x, 1)):
        d_rows, _ = _base_matrices(fit.base)
        assert np.abs(d_rows.T @ fit.factors.factors).max() <= 1e-8
        # the joint refit keeps the base coefficients
        np.testing.assert_allclose(fit.coef[: d_rows.shape[1]],
                                   ols(fit.base.design.y, d_rows)[0], atol=1e-8)


def _r2(y, resid):
    return 1 - resid @ resid / ((y - y.mean()) @ (y - y.mean()))


def test_faar_null_in_sample_fit():
    gains = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        y = ar_series((0.5,), 500, seed)
        x = rng.standard_normal((500, 12))
        fit = fit_faar(y, x, 1)
        d_rows, _ = _base_matrices(fit.base)
        full = np.column_stack([d_rows, fit.factors.factors])
        yy = fit.base.design.y
        gains.append(_r2(yy, yy - full @ fit.coef) - _r2(yy, fit.base.residuals))
    assert np.median(gains) < 0.05


def test_faar_forecast_uses_origin_predictors():
    rng = np.random.default_rng(12)
    u = rng.standard_normal(200)
    x = u[:, None] + 0.3 * rng.standard_normal((200, 4))
    y = np.r_[0.0, u[:-1]] + 0.2 * rng.standard_normal(200)
    fit = fit_faar(y, x, 1)
    # the next value loads on the last predictor row
    assert fit.forecast() == pytest.approx(u[-1], abs=0.5)


def test_fabm_falls_back_on_degenerate_x():
    y, gf, _ = _oth_inputs(13)
    fit = fit_fabm_gf(y, gf, np.ones((120, 4)), 1)
    assert fit.R == 0 and "fallback" in fit.diagnostics[0]
    assert fit.forecast() == pytest.approx(fit_bridge_gf(y, gf, 1, gf_first_lag=1).forecast())


def test_faar_rejects_misaligned_x():
    y = ar_series((0.5,), 100, 14)
    with pytest.raises(ValueError):
        fit_faar(y, np.zeros((90, 2)), 1)
