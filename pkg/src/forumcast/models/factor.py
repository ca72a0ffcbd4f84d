"""Factor-augmented AR (FAAR) and factor-augmented bridge (FABM-GF) models.

Both follow the same three steps: fit the base model by BIC, extract PLS
factors from the predictors against its residuals, then regress the target
on the base regressors and the retained factors jointly. Predictors are
standardized on the window and partialled out of the base design before PLS,
so the factors are orthogonal to the base columns and the joint step leaves
the base coefficients unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .ar import ARFit, BridgeFit, fit_ar_bic, fit_bridge_gf
from .design import ols
from .pls import AllPredictorsDegenerate, FactorSet, fit_pls

log = logging.getLogger(__name__)


@dataclass
class FactorModelFit:
    base: ARFit | BridgeFit
    factors: FactorSet | None
    xi: np.ndarray
    coef: np.ndarray
    x_mean: np.ndarray = field(repr=False)
    x_sd: np.ndarray = field(repr=False)
    projection: np.ndarray = field(repr=False)
    base_origin: np.ndarray = field(repr=False)
    x_origin: np.ndarray = field(repr=False)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def R(self) -> int:
        return 0 if self.factors is None else self.factors.R

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def q(self) -> int | None:
        return self.base.q if isinstance(self.base, BridgeFit) else None

    def origin_factors(self) -> np.ndarray:
        if self.factors is None:
            return np.zeros(0)
        xs = (self.x_origin - self.x_mean) / self.x_sd
        resid = xs - self.base_origin @ self.projection
        return resid @ self.factors.weights

    def forecast(self) -> float:
        row = np.r_[self.base_origin, self.origin_factors()]
        return float(row @ self.coef)


def _base_matrices(base: ARFit | BridgeFit) -> tuple[np.ndarray, np.ndarray]:
    """Estimation rows and origin row of the base model's retained regressors."""
    ar = base.ar if isinstance(base, BridgeFit) else base
    q = base.q if isinstance(base, BridgeFit) else None
    rows = ar.design.matrix(ar.p, q)
    origin = ar.design.origin_row(ar.p, q)
    mask = ar.column_mask if ar.column_mask is not None else np.ones(rows.shape[1], dtype=bool)
    return rows[:, mask], origin[mask]


def _augment(
    base: ARFit | BridgeFit,
    x: np.ndarray,
    r_max: int,
    threshold: float,
    names: list[str] | None,
) -> FactorModelFit:
    design = base.design
    x = np.asarray(x, dtype=float)
    if x.shape[0] != design.n:
        raise ValueError("predictor rows must align with the target window")
    m = x.shape[1]
    names = list(names) if names is not None else [f"x{j}" for j in range(m)]
    mean = x.mean(axis=0)
    sd = x.std(axis=0, ddof=1)
    live = sd > 1e-12 * np.maximum(1.0, np.abs(mean))
    diagnostics = [f"degenerate predictor {names[j]} dropped" for j in range(m) if not live[j]]
    if not live.any():
        raise AllPredictorsDegenerate("every predictor column has zero variance in the window")
    sd_safe = np.where(live, sd, 1.0)
    xs = np.where(live, (x - mean) / sd_safe, 0.0)

    d_rows, d_origin = _base_matrices(base)
    x_rows = xs[design.rows - design.h]
    projection, x_resid = ols(x_rows, d_rows)
    factors = fit_pls(base.residuals, x_resid[:, live], r_max, threshold,
                      [n for n, ok in zip(names, live) if ok])
    weights = np.zeros((m, factors.R))
    weights[live] = factors.weights
    factors = FactorSet(factors.R, weights, factors.factors, factors.explained_cov_share,
                        names, [names[j] for j in range(m) if not live[j]])
    coef, _ = ols(design.y, np.column_stack([d_rows, factors.factors]))
    return FactorModelFit(
        base=base,
        factors=factors,
        xi=coef[d_rows.shape[1] :],
        coef=coef,
        x_mean=mean,
        x_sd=sd_safe,
        projection=projection,
        base_origin=d_origin,
        x_origin=x[-1],
        diagnostics=diagnostics,
    )


def fit_faar(
    y: np.ndarray,
    x: np.ndarray,
    h: int,
    p_max: int = 13,
    r_max: int = 10,
    threshold: float = 0.20,
    names: list[str] | None = None,
    reach: int | None = None,
) -> FactorModelFit:
    """AR by BIC, PLS factors of ``x[t-h]`` on its residuals, joint refit."""
    base = fit_ar_bic(y, h, p_max, reach=reach)
    return _augment(base, x, r_max, threshold, names)


def fit_fabm_gf(
    y: np.ndarray,
    gf: np.ndarray,
    x: np.ndarray,
    h: int,
    p_max: int = 13,
    q_max: int = 13,
    r_max: int = 10,
    threshold: float = 0.20,
    gf_first_lag: int = 1,
    names: list[str] | None = None,
    reach: int | None = None,
) -> FactorModelFit:
    """Bridge model by BIC, then PLS factors built from the bridge residuals.

    When every predictor is degenerate the bridge model is returned without
    factors and the fallback is recorded in ``diagnostics``.
    """
    base = fit_bridge_gf(y, gf, h, p_max, q_max, gf_first_lag, reach=reach)
    try:
        return _augment(base, x, r_max, threshold, names)
    except AllPredictorsDegenerate as exc:
        log.info("FABM-GF falling back to BRIDGE-GF: %s", exc)
        d_rows, d_origin = _base_matrices(base)
        coef, _ = ols(base.design.y, d_rows)
        m = np.asarray(x).shape[1]
        return FactorModelFit(
            base=base,
            factors=None,
            xi=np.zeros(0),
            coef=coef,
            x_mean=np.zeros(m),
            x_sd=np.ones(m),
            projection=np.zeros((d_rows.shape[1], m)),
            base_origin=d_origin,
            x_origin=np.asarray(x, dtype=float)[-1],
            diagnostics=[f"fallback to BRIDGE-GF: {exc}"],
        )
