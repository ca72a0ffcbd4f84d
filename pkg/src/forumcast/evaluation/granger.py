"""Dumitrescu-Hurlin panel Granger non-causality test.

Reference: Dumitrescu and Hurlin (2012), Economic Modelling 29(4), 1450-1460.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

log = logging.getLogger(__name__)


@dataclass
class DHResult:
    K: int
    wald: np.ndarray
    w_bar: float
    z_bar: float
    z_bar_tilde: float
    pvalue: float
    pvalue_tilde: float
    units: list[str] = field(default_factory=list)
    T: int = 0
    diagnostics: list[str] = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.wald)


def unit_wald(y: np.ndarray, x: np.ndarray, K: int) -> float:
    """Wald statistic for the ``K`` lags of ``x`` in a regression of ``y`` on its own lags.

    Uses rows ``t = K..T-1`` and ``sigma^2 = RSS / (n - 2K - 1)``. Raises
    ``np.linalg.LinAlgError`` for a rank-deficient design.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    T = len(y)
    n = T - K
    cols = [np.ones(n)]
    cols += [y[K - k : T - k] for k in range(1, K + 1)]
    cols += [x[K - k : T - k] for k in range(1, K + 1)]
    Z = np.column_stack(cols)
    if np.linalg.matrix_rank(Z) < Z.shape[1]:
        raise np.linalg.LinAlgError("singular unit regression")
    target = y[K:]
    zz_inv = np.linalg.inv(Z.T @ Z)
    beta = zz_inv @ Z.T @ target
    resid = target - Z @ beta
    sigma2 = resid @ resid / (n - 2 * K - 1)
    if sigma2 <= 0:
        raise np.linalg.LinAlgError("zero residual variance")
    b = beta[1 + K :]
    V = zz_inv[1 + K :, 1 + K :]
    return float(b @ np.linalg.solve(V, b) / sigma2)


def z_statistics(wald: np.ndarray, K: int, T: int) -> tuple[float, float]:
    """``(Z_bar, Z_bar_tilde)`` from unit Wald statistics; ``T`` is the series length."""
    N = len(wald)
    w_bar = float(np.mean(wald))
    z_bar = math.sqrt(N / (2 * K)) * (w_bar - K)
    z_tilde = math.sqrt(N / (2 * K) * (T - 3 * K - 5) / (T - 2 * K - 3)) * (
        (T - 3 * K - 3) / (T - 3 * K - 1) * w_bar - K
    )
    return z_bar, z_tilde


def dumitrescu_hurlin(
    pairs: Sequence[tuple[np.ndarray, np.ndarray]],
    K: int,
    units: Sequence[str] | None = None,
) -> DHResult:
    """Test that ``x_i`` does not Granger-cause ``y_i`` in any unit.

    ``pairs`` holds one ``(y_i, x_i)`` pair per unit, all of length ``T``.
    Units whose regression is singular are dropped and noted. The reported
    ``pvalue`` is the two-sided normal p-value of ``Z_bar``.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    names = list(units) if units is not None else [str(i) for i in range(len(pairs))]
    lengths = {len(y) for y, _ in pairs} | {len(x) for _, x in pairs}
    if len(lengths) != 1:
        raise ValueError("all series must share a common length")
    T = lengths.pop()
    if T <= 5 + 3 * K:
        raise ValueError(f"T={T} too short for K={K}; need T > {5 + 3 * K}")
    wald, kept, notes = [], [], []
    for name, (y, x) in zip(names, pairs):
        if np.isnan(y).any() or np.isnan(x).any():
            notes.append(f"unit {name} dropped: missing values")
            continue
        try:
            wald.append(unit_wald(y, x, K))
            kept.append(name)
        except np.linalg.LinAlgError as exc:
            notes.append(f"unit {name} dropped: {exc}")
    for note in notes:
        log.info(note)
    if not wald:
        raise ValueError("no unit regression could be estimated")
    w = np.array(wald)
    z_bar, z_tilde = z_statistics(w, K, T)
    p = 2 * stats.norm.sf(abs(z_bar))
    p_tilde = 2 * stats.norm.sf(abs(z_tilde))
    return DHResult(K, w, float(w.mean()), z_bar, z_tilde, float(p), float(p_tilde),
                    kept, T, notes)
