"""Squared-error accuracy measures over a forecast sample."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..models.rolling import ForecastRun


class MisalignedRuns(ValueError):
    pass


@dataclass(frozen=True)
class LossSeries:
    kind: str
    origins: tuple[str, ...]
    losses: np.ndarray

    @property
    def n(self) -> int:
        return len(self.losses)

    @classmethod
    def from_run(cls, run: ForecastRun) -> "LossSeries":
        return cls(run.kind, tuple(run.origins), run.errors() ** 2)


def msfe(run: ForecastRun | Sequence[float]) -> float:
    """Mean of squared forecast errors (pass a run, or the errors themselves)."""
    errors = run.errors() if isinstance(run, ForecastRun) else np.asarray(run, dtype=float)
    if errors.size == 0:
        raise ValueError("MSFE of an empty forecast sample")
    return float(np.mean(errors**2))


def rmse(run: ForecastRun | Sequence[float]) -> float:
    return math.sqrt(msfe(run))


def relative_mse(run: ForecastRun, baseline: ForecastRun) -> float:
    """``msfe(run) / msfe(baseline)`` over identical origins."""
    if run.origins != baseline.origins:
        raise MisalignedRuns(f"{run.kind} and {baseline.kind} cover different origins")
    return msfe(run) / msfe(baseline)


def common_losses(runs: Sequence[ForecastRun]) -> list[LossSeries]:
    """Loss series restricted to the origins every run shares."""
    if not runs:
        return []
    shared = set(runs[0].origins)
    for run in runs[1:]:
        shared &= set(run.origins)
    out = []
    for run in runs:
        keep = [i for i, o in enumerate(run.origins) if o in shared]
        errs = run.errors()[keep]
        out.append(LossSeries(run.kind, tuple(run.origins[i] for i in keep), errs**2))
    return out


def restrict(run: ForecastRun, origins: Sequence[str]) -> ForecastRun:
    wanted = set(origins)
    return ForecastRun(run.city, run.kind, run.h, run.window,
                       [r for r in run.records if r.origin in wanted],
                       run.predictor_names, run.diagnostics)
