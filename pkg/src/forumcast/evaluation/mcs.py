"""Model Confidence Set with the range statistic and a circular block bootstrap.

Reference: Hansen, Lunde and Nason (2011), Econometrica 79(2), 453-497.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .metrics import LossSeries


@dataclass
class MCSResult:
    retained: list[str]
    elimination_order: list[str]
    pvalues: dict[str, float]
    alpha: float
    n_boot: int
    block_length: int
    statistic: str = "T_R"
    seed: int = 0
    stage_statistics: list[float] = field(default_factory=list)

    def included(self, alpha: float | None = None) -> list[str]:
        """Models whose MCS p-value reaches ``alpha`` (default: the run's level)."""
        a = self.alpha if alpha is None else alpha
        return [k for k in self.pvalues if self.pvalues[k] >= a]


def default_block_length(n: int) -> int:
    return max(2, math.ceil(n ** (1.0 / 3.0)))


def circular_block_indices(n: int, block: int, rng: np.random.Generator) -> np.ndarray:
    n_blocks = -(-n // block)
    starts = rng.integers(0, n, n_blocks)
    return ((starts[:, None] + np.arange(block)) % n).ravel()[:n]


def _replicate(args: tuple[np.random.SeedSequence, int, int]) -> np.ndarray:
    seq, n, block = args
    return circular_block_indices(n, block, np.random.default_rng(seq))


def bootstrap_indices(n: int, block: int, n_boot: int, seed: int,
                      mapper: Callable = map) -> np.ndarray:
    """``n_boot x n`` resampling indices; replicate ``b`` uses its own spawned stream.

    Because every replicate owns a substream, any (parallel) ``mapper`` gives
    the same array as the serial one.
    """
    seqs = np.random.SeedSequence(seed).spawn(n_boot)
    return np.vstack(list(mapper(_replicate, [(s, n, block) for s in seqs])))


def model_confidence_set(
    losses: Sequence[LossSeries] | np.ndarray,
    alpha: float = 0.10,
    n_boot: int = 5000,
    block_length: int | None = None,
    seed: int = 0,
    names: Sequence[str] | None = None,
    mapper: Callable = map,
    min_periods: int = 20,
) -> MCSResult:
    """Iteratively eliminate the worst model while equal predictive ability is rejected.

    At each stage the range statistic ``max |dbar_ij| / se(dbar_ij)`` is
    compared with its bootstrap distribution. The model with the largest
    studentized excess loss over the set average is removed, and its MCS
    p-value is the running maximum of the stage p-values. Models whose loss
    series are identical are removed together, so they are never separated.
    Every model gets a p-value; the last survivor gets 1.
    """
    if isinstance(losses, np.ndarray):
        mat = np.asarray(losses, dtype=float)
        kinds = list(names) if names is not None else [f"m{j}" for j in range(mat.shape[1])]
    else:
        series = list(losses)
        if len({s.origins for s in series}) > 1:
            raise ValueError("loss series cover different origins")
        mat = np.column_stack([s.losses for s in series])
        kinds = [s.kind for s in series]
    n, m = mat.shape
    if m < 2:
        raise ValueError("the MCS needs at least two models")
    if n < min_periods:
        raise ValueError(f"the MCS needs at least {min_periods} periods, got {n}")
    block = block_length or default_block_length(n)

    idx = bootstrap_indices(n, block, n_boot, seed, mapper)
    means = mat.mean(axis=0)
    boot_dev = mat[idx].mean(axis=1) - means  # n_boot x m

    groups: list[list[int]] = []
    for j in range(m):
        for g in groups:
            if np.array_equal(mat[:, g[0]], mat[:, j]):
                g.append(j)
                break
        else:
            groups.append([j])

    alive = [g[0] for g in groups]
    members = {g[0]: g for g in groups}
    order: list[str] = []
    pvalues: dict[str, float] = {}
    stats: list[float] = []
    running = 0.0
    while len(alive) > 1:
        a = np.array(alive)
        dbar = means[a][:, None] - means[a][None, :]
        ddev = boot_dev[:, a][:, :, None] - boot_dev[:, a][:, None, :]
        var = np.mean(ddev**2, axis=0)
        pos = var > 0
        se = np.sqrt(np.where(pos, var, 1.0))
        t_obs = np.where(pos, np.abs(dbar) / se, 0.0)
        t_range = float(t_obs.max())
        t_boot = np.where(pos, np.abs(ddev) / se, 0.0).reshape(n_boot, -1).max(axis=1)
        pval = float(np.mean(t_boot >= t_range)) if t_range > 0 else 1.0
        stats.append(t_range)

        excess = means[a] - means[a].mean()
        edev = boot_dev[:, a] - boot_dev[:, a].mean(axis=1, keepdims=True)
        evar = np.mean(edev**2, axis=0)
        t_i = np.where(evar > 0, excess / np.sqrt(np.where(evar > 0, evar, 1.0)), 0.0)
        worst = int(a[int(np.argmax(t_i))])

        running = max(running, pval)
        for j in members[worst]:
            order.append(kinds[j])
            pvalues[kinds[j]] = running
        alive.remove(worst)
    for j in members[alive[0]]:
        order.append(kinds[j])
        pvalues[kinds[j]] = 1.0

    retained = [k for k in kinds if pvalues[k] >= alpha]
    return MCSResult(retained, order, {k: pvalues[k] for k in kinds}, alpha, n_boot,
                     block, "T_R", seed, stats)
