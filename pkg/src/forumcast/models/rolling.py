"""Rolling-window pseudo-real-time forecasting.

At each origin only the ``window`` months ending at the origin are read:
gap filling, differencing, standardization, order selection, factor
extraction and estimation all happen inside that slice. Targets are modelled
in first differences by default; the level forecast for ``origin + h`` is the
last observed level plus the sum of direct forecasts of the differences at
horizons ``1..h``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from ..indicators import FORUM_VARIABLES, SIMPLE_VARIABLES, TARGET
from ..months import month_index, month_label
from ..tsprep import DIFF, TransformSpec, apply_transform, interpolate_single_gaps
from .ar import fit_ar_bic, fit_bridge_gf, fit_bridge_oth_gf
from .design import WindowTooShort
from .factor import fit_fabm_gf, fit_faar
from .pls import AllPredictorsDegenerate

log = logging.getLogger(__name__)

MODEL_KINDS = ("AR", "FAAR", "BRIDGE_GF", "FABM_GF", "BRIDGE_OTH_GF")
HORIZONS = (1, 3, 6, 12)


class InfeasibleOrigin(ValueError):
    pass


@dataclass
class ModelConfig:
    window: int = 60
    p_max: int = 13
    q_max: int = 13
    r_max: int = 10
    threshold: float = 0.20
    predictors: tuple[str, ...] = FORUM_VARIABLES
    target: str = TARGET
    gf: str = "google_trend_flights"
    simple: tuple[str, ...] = SIMPLE_VARIABLES
    bridge_gf_first_lag: int = 0
    fabm_gf_first_lag: int = 1
    transform: TransformSpec = field(default_factory=TransformSpec)
    # every model estimated on the same rows, so AR and bridge fits are comparable
    common_sample: bool = True

    @property
    def reach(self) -> int | None:
        return max(self.p_max - 1, self.q_max) if self.common_sample else None


@dataclass
class ForecastRecord:
    origin: str
    target_month: str
    forecast: float
    actual: float
    p: int
    q: int | None
    R: int
    weights: np.ndarray | None = None  # predictors x R

    @property
    def error(self) -> float:
        return self.actual - self.forecast


@dataclass
class ForecastRun:
    city: str
    kind: str
    h: int
    window: int
    records: list[ForecastRecord]
    predictor_names: list[str]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def origins(self) -> list[str]:
        return [r.origin for r in self.records]

    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.records])


@dataclass
class _Step:
    forecast: float
    p: int
    q: int | None
    R: int
    weights: np.ndarray | None


def _column(window: pd.DataFrame, name: str) -> np.ndarray:
    if name not in window.columns:
        raise InfeasibleOrigin(f"column {name} not in panel")
    return interpolate_single_gaps(window[name].to_numpy(dtype=float))


def _prepared(window: pd.DataFrame, names: Sequence[str], spec: TransformSpec,
              required: bool) -> tuple[np.ndarray, list[str], list[str]]:
    cols, kept, notes = [], [], []
    for name in names:
        v = _column(window, name)
        if np.isnan(v).any():
            if required:
                raise InfeasibleOrigin(f"{name} has unfillable gaps in the window")
            notes.append(f"{name} dropped: unfillable gaps")
            continue
        cols.append(apply_transform(v, spec.flag(name)))
        kept.append(name)
    n = len(window) - 1
    return (np.column_stack(cols) if cols else np.zeros((n, 0))), kept, notes


def _fit_step(kind: str, z: np.ndarray, j: int, window: pd.DataFrame,
              cfg: ModelConfig) -> _Step:
    spec = cfg.transform
    reach = cfg.reach
    if kind == "AR":
        fit = fit_ar_bic(z, j, cfg.p_max, reach=reach)
        return _Step(fit.forecast(), fit.p, None, 0, None)
    if kind in ("FAAR", "FABM_GF"):
        x, kept, _ = _prepared(window, cfg.predictors, spec, required=False)
        if not kept:
            raise InfeasibleOrigin("no usable predictors in the window")
        if kind == "FAAR":
            fit = fit_faar(z, x, j, cfg.p_max, cfg.r_max, cfg.threshold, kept, reach)
        else:
            gf, _, _ = _prepared(window, [cfg.gf], spec, required=True)
            fit = fit_fabm_gf(z, gf[:, 0], x, j, cfg.p_max, cfg.q_max, cfg.r_max,
                              cfg.threshold, cfg.fabm_gf_first_lag, kept, reach)
        weights = None
        if fit.factors is not None:
            weights = np.zeros((len(cfg.predictors), fit.R))
            for row, name in enumerate(kept):
                weights[cfg.predictors.index(name)] = fit.factors.weights[row]
        return _Step(fit.forecast(), fit.p, fit.q, fit.R, weights)
    gf, _, _ = _prepared(window, [cfg.gf], spec, required=True)
    if kind == "BRIDGE_GF":
        fit = fit_bridge_gf(z, gf[:, 0], j, cfg.p_max, cfg.q_max, cfg.bridge_gf_first_lag,
                            reach=reach)
    elif kind == "BRIDGE_OTH_GF":
        simple, _, _ = _prepared(window, cfg.simple, spec, required=True)
        fit = fit_bridge_oth_gf(z, gf[:, 0], simple, j, cfg.p_max, cfg.q_max,
                                cfg.bridge_gf_first_lag, reach)
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    return _Step(fit.forecast(), fit.p, fit.q, 0, None)


def window_forecast(window: pd.DataFrame, kind: str, h: int, cfg: ModelConfig,
                    step_cache: dict | None = None, origin: str | None = None
                    ) -> tuple[float, _Step]:
    """Level forecast for ``h`` months after the window's last month."""
    y = _column(window, cfg.target)
    if np.isnan(y).any():
        raise InfeasibleOrigin(f"{cfg.target} has unfillable gaps in the window")
    flag = cfg.transform.flag(cfg.target)
    z = apply_transform(y, flag)
    horizons = range(1, h + 1) if flag == DIFF else [h]
    total = 0.0
    step = None
    for j in horizons:
        key = (origin, kind, j)
        if step_cache is not None and origin is not None and key in step_cache:
            step = step_cache[key]
        else:
            step = _fit_step(kind, z, j, window, cfg)
            if step_cache is not None and origin is not None:
                step_cache[key] = step
        total += step.forecast
    level = y[-1] + total if flag == DIFF else total
    return float(level), step


def feasible_origins(months: Sequence[str], eval_months: Sequence[str], h: int,
                     window: int) -> list[tuple[str, str]]:
    """``(origin, target)`` pairs whose window lies inside ``months``."""
    first, last = month_index(months[0]), month_index(months[-1])
    out = []
    for target in eval_months:
        t = month_index(target)
        origin = t - h
        if origin - window + 1 >= first and t <= last:
            out.append((month_label(origin), target))
    return out


def rolling_run(
    frame: pd.DataFrame,
    kind: str,
    h: int,
    eval_months: Sequence[str],
    config: ModelConfig | None = None,
    city: str = "",
    step_cache: dict | None = None,
) -> ForecastRun:
    """Re-select and re-estimate at every origin, forecast ``h`` months ahead.

    ``frame`` is one city's panel slice indexed by month. Infeasible origins
    (not enough history, unfillable gaps, singular designs) are skipped with a
    diagnostic; the run fails only if every origin is infeasible.
    ``step_cache`` may be shared between runs on the *same* frame and kind to
    reuse direct fits at common origins.
    """
    cfg = config or ModelConfig()
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    months = sorted(frame.index, key=month_index)
    frame = frame.loc[months]
    pos = {m: i for i, m in enumerate(months)}
    records: list[ForecastRecord] = []
    diagnostics: list[str] = []
    pairs = feasible_origins(months, eval_months, h, cfg.window)
    skipped = len(eval_months) - len(pairs)
    if skipped:
        diagnostics.append(f"{skipped} evaluation months lack history or realization")
    for origin, target in pairs:
        end = pos[origin] + 1
        window = frame.iloc[end - cfg.window : end]
        try:
            level, step = window_forecast(window, kind, h, cfg, step_cache, origin)
        except (InfeasibleOrigin, WindowTooShort, AllPredictorsDegenerate,
                np.linalg.LinAlgError) as exc:
            diagnostics.append(f"origin {origin}: {exc}")
            continue
        actual = float(frame[cfg.target].iloc[pos[target]])
        if math.isnan(actual):
            diagnostics.append(f"origin {origin}: no realized value for {target}")
            continue
        records.append(ForecastRecord(origin, target, level, actual, step.p, step.q,
                                      step.R, step.weights))
    if not records:
        raise RuntimeError(f"{kind} h={h}: every origin infeasible ({'; '.join(diagnostics)})")
    return ForecastRun(city, kind, h, cfg.window, records, list(cfg.predictors), diagnostics)


def run_grid(
    frame: pd.DataFrame,
    kinds: Sequence[str],
    horizons: Sequence[int],
    eval_months: Sequence[str],
    config: ModelConfig | None = None,
    city: str = "",
    mapper: Callable = map,
) -> list[ForecastRun]:
    """All ``kind x horizon`` runs for one city, in sorted key order.

    ``mapper`` may be a parallel map (e.g. ``Pool.map``); jobs share no state
    so the output does not depend on it.
    """
    job = _GridJob(frame, tuple(sorted(horizons)), eval_months, config, city)
    return [run for runs in mapper(job, list(kinds)) for run in runs]


@dataclass
class _GridJob:
    frame: pd.DataFrame
    horizons: tuple[int, ...]
    eval_months: Sequence[str]
    config: ModelConfig | None
    city: str

    def __call__(self, kind: str) -> list[ForecastRun]:
        cache: dict = {}
        return [
            rolling_run(self.frame, kind, h, self.eval_months, self.config, self.city, cache)
            for h in self.horizons
        ]
