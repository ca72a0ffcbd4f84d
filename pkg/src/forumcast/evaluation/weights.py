"""How often each indicator's factor weight lands in the upper quartiles."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..models.rolling import ForecastRun

log = logging.getLogger(__name__)


@dataclass
class WeightQuartileTable:
    variables: list[str]
    q2_pct: np.ndarray
    q3_pct: np.ndarray
    q4_pct: np.ndarray
    n_steps: int
    diagnostics: list[str] = field(default_factory=list)

    def rows(self) -> list[tuple[str, float, float, float]]:
        return [(v, float(a), float(b), float(c))
                for v, a, b, c in zip(self.variables, self.q2_pct, self.q3_pct, self.q4_pct)]


def step_magnitudes(weights: np.ndarray) -> np.ndarray:
    """Per-indicator ``max |w|`` over the retained components (predictors x R)."""
    w = np.abs(np.asarray(weights, dtype=float))
    return w.max(axis=1) if w.ndim == 2 else w


def quartile_labels(magnitudes: np.ndarray) -> np.ndarray:
    """Quartile index 0..3 from the ascending rank, so each quartile holds ``M/4`` indicators.

    Ties are broken by indicator order.
    """
    m = len(magnitudes)
    order = np.argsort(magnitudes, kind="stable")
    labels = np.empty(m, dtype=int)
    labels[order] = (np.arange(m) * 4) // m
    return labels


def weight_quartiles(runs: Sequence[ForecastRun], horizon: int | None = None,
                     tol: float = 1e-12) -> WeightQuartileTable:
    """Percentage of steps each indicator falls in quartiles II, III and IV.

    Every origin of every run (typically FAAR runs for several cities) is one
    step. Steps without weights or with all-equal magnitudes are excluded.
    """
    selected = [r for r in runs if horizon is None or r.h == horizon]
    if not selected:
        raise ValueError("no runs with factor weights for this horizon")
    names = selected[0].predictor_names
    counts = np.zeros((len(names), 4))
    n_steps = 0
    notes: list[str] = []
    for run in selected:
        if run.predictor_names != names:
            raise ValueError("runs disagree on the predictor list")
        for rec in run.records:
            if rec.weights is None or rec.weights.size == 0:
                notes.append(f"{run.city} {rec.origin}: no factor weights")
                continue
            mag = step_magnitudes(rec.weights)
            if np.ptp(mag) <= tol * max(1.0, float(mag.max())):
                notes.append(f"{run.city} {rec.origin}: all weights equal, step excluded")
                continue
            counts[np.arange(len(names)), quartile_labels(mag)] += 1
            n_steps += 1
    for note in notes:
        log.info(note)
    if n_steps == 0:
        raise ValueError("every step was excluded")
    pct = 100.0 * counts / n_steps
    return WeightQuartileTable(list(names), pct[:, 1], pct[:, 2], pct[:, 3], n_steps, notes)
