from multiprocessing.dummy import Pool

import numpy as np
import pytest

from conftest import factor_panel
from forumcast.indicators import TARGET
from forumcast.models import ModelConfig, feasible_origins, fit_ar_bic, rolling_run, run_grid
from forumcast.models.rolling import window_forecast
from forumcast.months import month_range

EVAL = month_range("2013-06", "2016-12")


@pytest.fixture(scope="module")
def frame():
    return factor_panel(0)


def test_record_count_is_eval_span(frame):
    run = rolling_run(frame, "AR", 1, EVAL)
    assert len(EVAL) == 43 and len(run.records) == 43
    assert run.records[0].origin == "2013-05" and run.records[-1].target_month == "2016-12"


def test_longer_horizon_loses_no_origins_with_history(frame):
    # targets stay inside the panel; every origin still has a full window
    assert len(rolling_run(frame, "AR", 12, EVAL).records) == 43


def test_feasible_origins_need_full_window():
    months = month_range("2010-01", "2015-12")
    pairs = feasible_origins(months, month_range("2014-06", "2016-03"), 1, 60)
    assert pairs[0] == ("2014-12", "2015-01") and pairs[-1][1] == "2015-12"


@pytest.mark.parametrize("kind", ["AR", "FAAR", "BRIDGE_GF", "FABM_GF", "BRIDGE_OTH_GF"])
def test_no_leakage(frame, kind):
    cutoff = "2014-12"
    spoiled = frame.copy()
    spoiled.loc[spoiled.index > cutoff] *= 10
    a = rolling_run(frame, kind, 3, EVAL)
    b = rolling_run(spoiled, kind, 3, EVAL)
    before = [(ra, rb) for ra, rb in zip(a.records, b.records) if ra.origin <= cutoff]
    assert len(before) >= 10
    for ra, rb in before:
        assert ra.forecast == rb.forecast
        assert (ra.p, ra.q, ra.R) == (rb.p, rb.q, rb.R)


def test_ar_beats_naive_mean(frame):
    run = rolling_run(frame, "AR", 1, EVAL)
    level = frame[TARGET]
    naive = np.array([level.loc[:r.origin].iloc[-60:].mean() for r in run.records])
    actual = np.array([r.actual for r in run.records])
    assert np.mean(run.errors() ** 2) < np.mean((actual - naive) ** 2)


def test_level_forecast_cumulates_direct_steps(frame):
    cfg = ModelConfig()
    window = frame.loc[:"2014-06"].iloc[-60:]
    level, _ = window_forecast(window, "AR", 3, cfg)
    y = window[TARGET].to_numpy()
    z = np.diff(y)
    steps = [fit_ar_bic(z, j, reach=cfg.reach).forecast() for j in (1, 2, 3)]
    assert level == pytest.approx(y[-1] + sum(steps), rel=1e-12)


def test_step_cache_reuses_fits(frame):
    cache = {}
    a = rolling_run(frame, "AR", 3, EVAL[:5], step_cache=cache)
    assert {k[2] for k in cache} == {1, 2, 3}
    b = rolling_run(frame, "AR", 3, EVAL[:5], step_cache=cache)
    assert [r.forecast for r in a.records] == [r.forecast for r in b.records]


def test_records_carry_factor_weights(frame):
    run = rolling_run(frame, "FAAR", 1, EVAL[:6])
    for r in run.records:
        assert r.R >= 1 and r.weights.shape == (len(run.predictor_names), r.R)


def test_mapper_invariance(frame):
    kinds, horizons = ["AR", "BRIDGE_GF"], [1, 3]
    serial = run_grid(frame, kinds, horizons, EVAL[:8])
    with Pool(2) as pool:
        parallel = run_grid(frame, kinds, horizons, EVAL[:8], mapper=pool.map)
    assert [(r.kind, r.h) for r in serial] == [(r.kind, r.h) for r in parallel]
    for a, b in zip(serial, parallel):
        assert [x.forecast for x in a.records] == [x.forecast for x in b.records]


def test_gap_is_filled_or_skipped(frame):
    gappy = frame.copy()
    gappy.loc["2012-03", TARGET] = np.nan
    run = rolling_run(gappy, "AR", 1, EVAL[:6])
    assert len(run.records) == 6 and not run.diagnostics
    # a two-month gap cannot be filled; origins whose window holds it are skipped
    gappy = frame.copy()
    gappy.loc[["2009-03", "2009-04"], TARGET] = np.nan
    run = rolling_run(gappy, "AR", 1, EVAL)
    # the first clean 60-month window starts in 2009-05
    assert run.records[0].origin == "2014-04"
    assert any("unfillable" in d for d in run.diagnostics)


def test_all_infeasible_raises(frame):
    with pytest.raises(RuntimeError):
        rolling_run(frame.iloc[:50], "AR", 1, month_range("2010-06", "2010-12"))


def test_unknown_kind(frame):
    with pytest.raises(ValueError):
        rolling_run(frame, "VAR", 1, EVAL)
