"""Accuracy, causality and weight tables as tidy CSV frames."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Sequence

import pandas as pd

from ..fileio import atomic_write_text
from ..models.rolling import ForecastRun
from .granger import DHResult
from .mcs import model_confidence_set
from .metrics import common_losses, msfe, restrict, rmse
from .weights import WeightQuartileTable

ACCURACY_COLUMNS = ["city", "h", "model", "rel_mse", "rmse", "in_superior_set"]
GRANGER_COLUMNS = ["variable", "lag", "zbar", "zbar_tilde", "pvalue"]
WEIGHT_COLUMNS = ["variable", "q2_pct", "q3_pct", "q4_pct"]


def accuracy_table(runs: Sequence[ForecastRun], baseline: str = "AR", alpha: float = 0.10,
                   n_boot: int = 5000, seed: int = 0, min_periods: int = 20) -> pd.DataFrame:
    """Relative MSE, RMSE and MCS membership per ``(city, h, model)``.

    Within each ``(city, h)`` cell all models are scored on their common
    origins, so every ratio compares forecasts of the same months.
    """
    cells: dict[tuple[str, int], list[ForecastRun]] = {}
    for run in runs:
        cells.setdefault((run.city, run.h), []).append(run)
    rows = []
    for (city, h), group in sorted(cells.items()):
        group = sorted(group, key=lambda r: r.kind)
        losses = common_losses(group)
        shared = losses[0].origins
        trimmed = {r.kind: restrict(r, shared) for r in group}
        if baseline not in trimmed:
            raise ValueError(f"no {baseline} run for {city} h={h}")
        base = msfe(trimmed[baseline])
        superior = set(trimmed)
        if len(group) > 1 and len(shared) >= min_periods:
            superior = set(model_confidence_set(losses, alpha, n_boot, seed=seed,
                                                min_periods=min_periods).retained)
        for kind, run in trimmed.items():
            rel = msfe(run) / base if base > 0 else float("nan")
            rows.append((city, h, kind, rel, rmse(run), int(kind in superior)))
    return pd.DataFrame(rows, columns=ACCURACY_COLUMNS)


def granger_table(results: dict[tuple[str, int], DHResult]) -> pd.DataFrame:
    rows = [(var, lag, r.z_bar, r.z_bar_tilde, r.pvalue)
            for (var, lag), r in sorted(results.items())]
    return pd.DataFrame(rows, columns=GRANGER_COLUMNS)


def weight_table(table: WeightQuartileTable) -> pd.DataFrame:
    return pd.DataFrame(table.rows(), columns=WEIGHT_COLUMNS)


def write_table(frame: pd.DataFrame, path: str | Path) -> None:
    atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n"))


def load_table4_fixture() -> pd.DataFrame:
    """Published accuracy table for seven cities, in the accuracy-table layout."""
    ref = resources.files("forumcast.data").joinpath("table4_fixture.csv")
    with ref.open("r", encoding="utf-8") as fh:
        return pd.read_csv(fh)
