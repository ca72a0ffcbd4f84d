"""Stationarity transforms, window-local standardization and deseasonalization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .months import month_index, month_label

LEVEL = "level"
DIFF = "first_difference"
# variables the unit-root screening found stationary in levels
LEVEL_VARIABLES = ("group_betweenness_centrality", "avg_response_time")


class DegeneratePredictor(ValueError):
    """Zero variance inside the estimation window."""


@dataclass(frozen=True)
class MonthlySeries:
    name: str
    months: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if len(self.months) != len(vals):
            raise ValueError("months and values differ in length")
        idx = [month_index(m) for m in self.months]
        if any(b != a + 1 for a, b in zip(idx, idx[1:])):
            raise ValueError(f"{self.name}: months are not gap-free and increasing")

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_values(cls, name: str, start: str, values: Sequence[float]) -> "MonthlySeries":
        i0 = month_index(start)
        return cls(name, tuple(month_label(i0 + k) for k in range(len(values))), values)


@dataclass
class TransformSpec:
    """Per-variable differencing flags; defaults difference all but ``LEVEL_VARIABLES``."""

    flags: dict[str, str] = field(default_factory=dict)
    standardize: bool = True
    sd_ddof: int = 1

    def flag(self, name: str) -> str:
        if name in self.flags:
            return self.flags[name]
        return LEVEL if name in LEVEL_VARIABLES else DIFF

    @classmethod
    def from_mapping(cls, overrides: Mapping[str, str] | None = None) -> "TransformSpec":
        flags = dict(overrides or {})
        for k, v in flags.items():
            if v not in (LEVEL, DIFF):
                raise ValueError(f"transform for {k} must be {LEVEL!r} or {DIFF!r}")
        return cls(flags)


def difference(s: MonthlySeries) -> MonthlySeries:
    if len(s) < 2:
        raise ValueError("differencing needs at least two observations")
    return MonthlySeries(s.name, s.months[1:], np.diff(s.values))


def undifference(d: MonthlySeries, anchor: float) -> np.ndarray:
    """Levels from differences given the level just before ``d`` starts."""
    return anchor + np.cumsum(d.values)


def apply_transform(values: np.ndarray, flag: str) -> np.ndarray:
    """Transformed column aligned to ``values[1:]`` so all columns share one row set."""
    values = np.asarray(values, dtype=float)
    if flag == DIFF:
        return np.diff(values)
    if flag == LEVEL:
        return values[1:]
    raise ValueError(f"unknown transform {flag!r}")


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    sd: np.ndarray

    @classmethod
    def fit(cls, window: np.ndarray, ddof: int = 1) -> "Standardizer":
        """Column means and standard deviations of the estimation window only."""
        window = np.asarray(window, dtype=float)
        sd = window.std(axis=0, ddof=ddof)
        if np.any(~(sd > 0)):
            raise DegeneratePredictor(f"zero variance in columns {np.flatnonzero(~(sd > 0))}")
        return cls(window.mean(axis=0), sd)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.sd


def standardize(s: MonthlySeries, window: slice | None = None, ddof: int = 1) -> MonthlySeries:
    """Standardize with mean and sd taken from ``s.values[window]``."""
    ref = s.values if window is None else s.values[window]
    st = Standardizer.fit(ref, ddof)
    return MonthlySeries(s.name, s.months, st(s.values))


def interpolate_single_gaps(values: np.ndarray) -> np.ndarray:
    """Fill interior one-month gaps linearly; longer or edge gaps stay missing."""
    out = np.array(values, dtype=float)
    nan = np.isnan(out)
    for i in np.flatnonzero(nan):
        if 0 < i < len(out) - 1 and not nan[i - 1] and not nan[i + 1]:
            out[i] = 0.5 * (out[i - 1] + out[i + 1])
    return out


@dataclass(frozen=True)
class UnitRootResult:
    statistic: float
    lag: int
    pvalue: float
    critical_5pct: float
    reject: bool


def unit_root_check(s: MonthlySeries | np.ndarray, max_lag: int = 12) -> UnitRootResult:
    """Augmented Dickey-Fuller with constant, lag chosen by BIC, 5% decision."""
    from statsmodels.tsa.stattools import adfuller

    values = s.values if isinstance(s, MonthlySeries) else np.asarray(s, dtype=float)
    if len(values) < 20:
        raise ValueError("unit-root check needs at least 20 observations")
    stat, pvalue, lag, _, crit, *_ = adfuller(
        values, maxlag=max_lag, regression="c", autolag="BIC"
    )
    return UnitRootResult(float(stat), int(lag), float(pvalue), float(crit["5%"]),
                          bool(stat < crit["5%"]))


def seasonal_component_classical(values: np.ndarray, period: int = 12) -> np.ndarray:
    """Month-of-year means of the detrended series, re-centred to sum to zero."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if period % 2 == 0:
        kernel = np.r_[0.5, np.ones(period - 1), 0.5] / period
    else:
        kernel = np.ones(period) / period
    half = len(kernel) // 2
    trend = np.full(n, np.nan)
    trend[half : n - half] = np.convolve(x, kernel, mode="valid")
    detrended = x - trend
    slots = np.array([np.nanmean(detrended[k::period]) for k in range(period)])
    slots -= slots.mean()
    return np.resize(slots, n)


def deseasonalize(
    s: MonthlySeries | np.ndarray,
    method: str = "classical_additive",
    period: int = 12,
) -> MonthlySeries | np.ndarray:
    """Seasonally adjusted series: the input minus its seasonal component."""
    values = s.values if isinstance(s, MonthlySeries) else np.asarray(s, dtype=float)
    if len(values) < 2 * period:
        raise ValueError(f"deseasonalizing needs at least {2 * period} observations")
    if method == "classical_additive":
        seasonal = seasonal_component_classical(values, period)
    elif method == "stl_loess":
        from statsmodels.tsa.seasonal import STL

        if not np.any(values != values[0]):
            seasonal = np.zeros_like(values)
        else:
            seasonal = np.asarray(STL(values, period=period, robust=False).fit().seasonal)
    else:
        raise ValueError(f"unknown deseasonalization method {method!r}")
    adjusted = values - seasonal
    if isinstance(s, MonthlySeries):
        return MonthlySeries(s.name, s.months, adjusted)
    return adjusted
