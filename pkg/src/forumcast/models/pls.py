"""SIMPLS partial least squares for a single response."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


class AllPredictorsDegenerate(ValueError):
    pass


@dataclass
class SimplsResult:
    weights: np.ndarray  # predictors x components, scores = X @ weights
    scores: np.ndarray  # observations x components, unit-norm columns
    loadings: np.ndarray  # X' scores
    covariances: np.ndarray  # scores' y per component
    criteria: np.ndarray  # ||S_a||^2, the squared covariance a unit weight attains at step a


def simpls(x: np.ndarray, y: np.ndarray, n_components: int | None = None) -> SimplsResult:
    """de Jong's SIMPLS with one response.

    ``x`` and ``y`` must already be centred. With one response the dominant
    direction of the deflated cross-product ``S = X'y`` is ``S`` itself, so no
    eigen-decomposition is needed. Extraction stops early once the remaining
    cross-product or the score vanishes, which bounds the count by rank.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, m = x.shape
    limit = min(m, n - 1) if n_components is None else min(n_components, m, n - 1)
    s = x.T @ y
    s0 = float(np.linalg.norm(s))
    scale = float(np.linalg.norm(x))
    basis = np.zeros((m, 0))
    ws, ts, ps, cs, crit = [], [], [], [], []
    for _ in range(limit):
        if s0 == 0 or np.linalg.norm(s) <= 1e-10 * s0:
            break
        r = s.copy()
        snorm = float(np.linalg.norm(s))
        t = x @ r
        tn = float(np.linalg.norm(t))
        if tn <= 1e-12 * scale * float(np.linalg.norm(r)):
            break
        t /= tn
        r /= tn
        p = x.T @ t
        v = p - basis @ (basis.T @ p)
        v -= basis @ (basis.T @ v)  # second pass keeps the basis orthonormal
        v /= np.linalg.norm(v)
        s = s - v * (v @ s)
        basis = np.column_stack([basis, v])
        ws.append(r)
        ts.append(t)
        ps.append(p)
        cs.append(float(t @ y))
        crit.append(snorm**2)
    k = len(ws)
    return SimplsResult(
        weights=np.column_stack(ws) if k else np.zeros((m, 0)),
        scores=np.column_stack(ts) if k else np.zeros((n, 0)),
        loadings=np.column_stack(ps) if k else np.zeros((m, 0)),
        covariances=np.asarray(cs),
        criteria=np.asarray(crit),
    )


@dataclass
class FactorSet:
    """Retained PLS factors.

    ``explained_cov_share`` covers every extracted component, retained or not.
    Component ``a`` is credited with ``||S_a||^2``, the squared covariance
    between the residuals and the best unit-weight combination of the deflated
    predictors (the SIMPLS objective at that step); deflation is a projection,
    so the shares never increase.
    """

    R: int
    weights: np.ndarray
    factors: np.ndarray
    explained_cov_share: np.ndarray
    predictor_names: list[str]
    dropped: list[str] = field(default_factory=list)

    def scores_for(self, x_rows: np.ndarray) -> np.ndarray:
        return np.asarray(x_rows, dtype=float) @ self.weights


def retained_count(shares: np.ndarray, r_max: int, threshold: float) -> int:
    """Leading components with share at least ``threshold``, at least one, at most ``r_max``."""
    r = 1
    while r < min(len(shares), r_max) and shares[r] >= threshold:
        r += 1
    return r


def fit_pls(
    residuals: np.ndarray,
    x: np.ndarray,
    r_max: int = 10,
    threshold: float = 0.20,
    names: list[str] | None = None,
) -> FactorSet:
    """PLS factors of ``x`` against AR residuals.

    Columns with zero variance are dropped (their weights are reported as 0);
    if none remain :class:`AllPredictorsDegenerate` is raised.
    """
    x = np.asarray(x, dtype=float)
    e = np.asarray(residuals, dtype=float).ravel()
    n, m = x.shape
    names = list(names) if names is not None else [f"x{j}" for j in range(m)]
    live = x.std(axis=0) > 1e-12 * max(1.0, float(np.abs(x).max(initial=0.0)))
    dropped = [names[j] for j in range(m) if not live[j]]
    if dropped:
        log.info("PLS: dropping degenerate predictors %s", dropped)
    if not live.any():
        raise AllPredictorsDegenerate("every predictor column has zero variance")
    res = simpls(x[:, live], e)
    if res.weights.shape[1] == 0:
        raise AllPredictorsDegenerate("predictors carry no covariance with the residuals")
    shares = res.criteria / res.criteria.sum()
    r = retained_count(shares, r_max, threshold)
    weights = np.zeros((m, r))
    weights[live] = res.weights[:, :r]
    return FactorSet(
        R=r,
        weights=weights,
        factors=res.scores[:, :r],
        explained_cov_share=shares,
        predictor_names=names,
        dropped=dropped,
    )
