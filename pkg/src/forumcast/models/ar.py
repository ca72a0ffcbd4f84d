"""Direct h-step autoregressions and distributed-lag bridge models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .design import DirectDesign, Selection, WindowTooShort, ols


@dataclass
class ARFit:
    """Autoregressive part of a direct projection.

    ``sigma2`` is ``RSS / n_eff``, the variance entering the BIC
    ``n_eff * ln(sigma2) + k * ln(n_eff)``.
    """

    p: int
    phi: np.ndarray
    intercept: float
    residuals: np.ndarray
    sigma2: float
    bic: float
    h: int
    design: DirectDesign = field(repr=False)
    rank_reduced: bool = False
    # columns of design.matrix(p, q) that entered the regression
    column_mask: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_eff(self) -> int:
        return len(self.residuals)

    def forecast(self) -> float:
        return ar_forecast(self, self.design.z)


@dataclass
class BridgeFit:
    """AR lags plus lags of a search-volume series and optional origin-dated extras."""

    q: int
    gamma: np.ndarray
    ar: ARFit
    gf_first_lag: int
    extra_coef: np.ndarray = field(default_factory=lambda: np.zeros(0))
    coef: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    @property
    def p(self) -> int:
        return self.ar.p

    @property
    def residuals(self) -> np.ndarray:
        return self.ar.residuals

    @property
    def design(self) -> DirectDesign:
        return self.ar.design

    def forecast(self) -> float:
        return float(self.design.origin_row(self.p, self.q) @ self.coef)


def _fit_selected(
    design: DirectDesign, sel: Selection
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients in the full layout (zeros where columns were dropped), residuals, mask."""
    x, mask = design.fit_matrix(sel)
    coef_kept, resid = ols(design.y, x)
    coef = np.zeros(mask.size)
    coef[mask] = coef_kept
    return coef, resid, mask


def fit_ar_bic(y: np.ndarray, h: int, p_max: int = 13, reach: int | None = None) -> ARFit:
    """BIC-selected direct projection of ``y[t]`` on ``1, y[t-h], ..., y[t-h-p+1]``.

    For ``h = 1`` this is the ordinary one-step autoregression. ``reach``
    fixes an earlier common sample start so several models share rows.
    """
    design = DirectDesign(np.asarray(y, dtype=float), h, p_max, reach=reach)
    sel = design.select()
    coef, resid, mask = _fit_selected(design, sel)
    return ARFit(
        p=sel.p,
        phi=coef[1 : 1 + sel.p],
        intercept=float(coef[0]),
        residuals=resid,
        sigma2=float(resid @ resid / len(resid)),
        bic=sel.bic,
        h=h,
        design=design,
        rank_reduced=sel.rank_reduced,
        column_mask=mask,
    )


def ar_forecast(fit: ARFit, recent: np.ndarray) -> float:
    """``intercept + sum_i phi_i * recent[-i]``; ``recent`` ends at the origin."""
    recent = np.asarray(recent, dtype=float)
    if len(recent) < fit.p:
        raise ValueError(f"need {fit.p} recent values, got {len(recent)}")
    lags = recent[::-1][: fit.p]
    return float(fit.intercept + fit.phi @ lags)


def fit_bridge_gf(
    y: np.ndarray,
    gf: np.ndarray,
    h: int,
    p_max: int = 13,
    q_max: int = 13,
    gf_first_lag: int = 0,
    extra: np.ndarray | None = None,
    reach: int | None = None,
) -> BridgeFit:
    """Joint BIC over ``(p, q)`` for AR lags plus ``gf[t-h-k]``, ``k = first..q``.

    ``gf_first_lag = 0`` includes the search volume observed at the origin,
    ``1`` starts one month earlier. ``extra`` columns enter at the origin date.
    """
    design = DirectDesign(
        np.asarray(y, dtype=float), h, p_max, gf=gf, q_max=q_max,
        gf_first_lag=gf_first_lag, extra=extra, reach=reach,
    )
    sel = design.select()
    coef, resid, mask = _fit_selected(design, sel)
    n_gf = design.n_gf(sel.q)
    ar = ARFit(
        p=sel.p,
        phi=coef[1 : 1 + sel.p],
        intercept=float(coef[0]),
        residuals=resid,
        sigma2=float(resid @ resid / len(resid)),
        bic=sel.bic,
        h=h,
        design=design,
        rank_reduced=sel.rank_reduced,
        column_mask=mask,
    )
    return BridgeFit(
        q=int(sel.q),
        gamma=coef[1 + sel.p : 1 + sel.p + n_gf],
        ar=ar,
        gf_first_lag=gf_first_lag,
        extra_coef=coef[1 + sel.p + n_gf :],
        coef=coef,
    )


def fit_bridge_oth_gf(
    y: np.ndarray,
    gf: np.ndarray,
    simple: np.ndarray,
    h: int,
    p_max: int = 13,
    q_max: int = 13,
    gf_first_lag: int = 0,
    reach: int | None = None,
) -> BridgeFit:
    """Bridge model augmented with the simpler forum metrics at the origin date.

    ``simple`` holds post counts, replies per thread and the spread of user
    levels as columns.
    """
    simple = np.asarray(simple, dtype=float)
    if simple.ndim != 2 or simple.shape[1] != 3:
        raise ValueError("simple metrics must be an (n, 3) array")
    return fit_bridge_gf(y, gf, h, p_max, q_max, gf_first_lag, extra=simple, reach=reach)


__all__ = [
    "ARFit",
    "BridgeFit",
    "WindowTooShort",
    "ar_forecast",
    "fit_ar_bic",
    "fit_bridge_gf",
    "fit_bridge_oth_gf",
]
