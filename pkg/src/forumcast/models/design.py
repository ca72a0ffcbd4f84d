"""Direct h-step regression designs and BIC order selection.

Rows are indexed by the target month ``t`` of a window of transformed data
``z[0..n-1]``. Own lags enter as ``z[t-h], ..., z[t-h-p+1]``, exogenous
search-volume lags as ``gf[t-h-k]`` for ``k = first_lag..q`` and
origin-dated extras as ``extra[t-h]``. Every candidate order is estimated on
the same rows (fixed by the largest orders) so BIC values are comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class WindowTooShort(ValueError):
    pass


@dataclass
class Selection:
    p: int
    q: int | None
    bic: float
    rank_reduced: bool = False
    # positions in [1, gf lags..., extras...] that entered the fit
    fixed_columns: list[int] | None = None


@dataclass
class DirectDesign:
    z: np.ndarray
    h: int
    p_max: int
    gf: np.ndarray | None = None
    q_max: int = 0
    gf_first_lag: int = 0
    extra: np.ndarray | None = None
    reach: int | None = None

    def __post_init__(self) -> None:
        self.z = np.asarray(self.z, dtype=float)
        n = len(self.z)
        if self.h < 1 or self.p_max < 1:
            raise ValueError("h and p_max must be positive")
        if self.gf is not None:
            self.gf = np.asarray(self.gf, dtype=float)
            if len(self.gf) != n:
                raise ValueError("gf must align with the target")
            if self.q_max < self.gf_first_lag:
                raise ValueError("q_max below the first GF lag")
        if self.extra is not None:
            self.extra = np.asarray(self.extra, dtype=float).reshape(n, -1)
        reach = self.p_max - 1
        if self.gf is not None:
            reach = max(reach, self.q_max)
        if self.reach is not None:
            if self.reach < reach:
                raise ValueError(f"reach {self.reach} shorter than the lags need ({reach})")
            reach = self.reach
        self.start = self.h + reach
        n_params = 1 + self.p_max + self.n_gf(self.q_max) + self.n_extra
        if n - self.start < n_params + 2:
            raise WindowTooShort(
                f"window of {n} leaves {n - self.start} rows for up to {n_params} coefficients"
            )

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def n_extra(self) -> int:
        return 0 if self.extra is None else self.extra.shape[1]

    def n_gf(self, q: int | None) -> int:
        if self.gf is None or q is None:
            return 0
        return q - self.gf_first_lag + 1

    @property
    def q_values(self) -> list[int | None]:
        if self.gf is None:
            return [None]
        return list(range(self.gf_first_lag, self.q_max + 1))

    @property
    def rows(self) -> np.ndarray:
        return np.arange(self.start, self.n)

    @property
    def y(self) -> np.ndarray:
        return self.z[self.start :]

    def _block(self, anchor: np.ndarray, p: int, q: int | None) -> np.ndarray:
        """Regressors for target rows whose origin index is ``anchor``."""
        cols = [np.ones(len(anchor))]
        cols += [self.z[anchor - i] for i in range(p)]
        if self.gf is not None and q is not None:
            cols += [self.gf[anchor - k] for k in range(self.gf_first_lag, q + 1)]
        if self.extra is not None:
            cols += list(self.extra[anchor].T)
        return np.column_stack(cols)

    def matrix(self, p: int, q: int | None = None) -> np.ndarray:
        return self._block(self.rows - self.h, p, q)

    def fit_matrix(self, sel: Selection) -> tuple[np.ndarray, np.ndarray]:
        """Design of the selected orders with dropped exogenous columns removed.

        Returns the matrix and the mask of retained columns in the full
        ``[1, z lags, gf lags, extras]`` layout.
        """
        full = self.matrix(sel.p, sel.q)
        mask = np.ones(full.shape[1], dtype=bool)
        if sel.fixed_columns is not None:
            fixed_pos = [0] + list(range(1 + sel.p, full.shape[1]))
            for j, pos in enumerate(fixed_pos):
                mask[pos] = j in sel.fixed_columns
        return full[:, mask], mask

    def origin_row(self, p: int, q: int | None = None) -> np.ndarray:
        """Regressors dated at the window's last month, used to forecast ``n-1+h``."""
        return self._block(np.array([self.n - 1]), p, q)[0]

    def select(self) -> Selection:
        """BIC over ``p in 1..p_max`` and every admissible ``q``.

        Ties go to the smaller ``p``, then the smaller ``q``. Candidates whose
        design loses rank are skipped and the selection is flagged.
        """
        y = self.y
        n_eff = len(y)
        yy = float(y @ y)
        best: Selection | None = None
        reduced = False
        table: dict[tuple[int, int | None], float] = {}
        kept: dict[int | None, list[int]] = {}
        for q in self.q_values:
            full = self.matrix(self.p_max, q)
            # exogenous columns that add nothing (e.g. an all-zero series) are
            # dropped and not charged in the penalty; lstsq then gives them 0
            fixed = np.column_stack([full[:, :1], full[:, 1 + self.p_max :]])
            keep = independent_columns(fixed)
            kept[q] = keep
            # own lags last so that every AR order is a column prefix
            ordered = np.column_stack([fixed[:, keep], full[:, 1 : 1 + self.p_max]])
            qmat, rmat = np.linalg.qr(ordered)
            diag = np.abs(np.diag(rmat))
            ok = diag > 1e-10 * diag.max()
            proj = (qmat.T @ y) ** 2
            for p in range(1, self.p_max + 1):
                k = len(keep) + p
                if not ok[:k].all():
                    reduced = True
                    continue
                rss = max(yy - float(proj[:k].sum()), 1e-300)
                table[(p, q)] = n_eff * math.log(rss / n_eff) + k * math.log(n_eff)
        for p in range(1, self.p_max + 1):
            for q in self.q_values:
                bic = table.get((p, q))
                if bic is not None and (best is None or bic < best.bic):
                    best = Selection(p, q, bic, fixed_columns=kept[q])
        if best is None:
            raise np.linalg.LinAlgError("every candidate design is rank deficient")
        best.rank_reduced = reduced
        return best


def independent_columns(x: np.ndarray, tol: float = 1e-10) -> list[int]:
    """Indices of columns not spanned by the columns before them."""
    _, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    scale = max(float(np.linalg.norm(x, axis=0).max()), 1e-300)
    return [j for j, d in enumerate(diag) if d > tol * scale]


def ols(y: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return coef, y - x @ coef


def bic_value(rss: float, n: int, k: int) -> float:
    """``n ln(rss/n) + k ln(n)``, the convention used for every order search."""
    return n * math.log(max(rss, 1e-300) / n) + k * math.log(n)
