"""Monte Carlo experiments shared by the acceptance suite and the scripts."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .evaluation import dumitrescu_hurlin, model_confidence_set, msfe
from .indicators import TARGET, IndicatorConfig, compute_panel
from .models import ModelConfig, fit_ar_bic, rolling_run
from .months import month_range, shift_month
from .synthetic import SyntheticConfig, generate_synthetic_forum, latent_series


def ar2_recovery(seeds: Sequence[int], phi: tuple[float, float] = (0.5, -0.3), n: int = 500,
                 burn: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Selected orders and the fitted ``(phi_1, phi_2)`` (NaN where p < 2) per seed."""
    orders, coefs = [], []
    for seed in seeds:
        e = np.random.default_rng(seed).standard_normal(n + burn)
        y = np.zeros(n + burn)
        for t in range(2, n + burn):
            y[t] = phi[0] * y[t - 1] + phi[1] * y[t - 2] + e[t]
        fit = fit_ar_bic(y[burn:], 1)
        orders.append(fit.p)
        c = np.full(2, np.nan)
        c[: min(2, fit.p)] = fit.phi[:2]
        coefs.append(c)
    return np.array(orders), np.array(coefs)


@dataclass
class SignalResult:
    seed: int
    loaded_ratio: float
    null_ratio: float


def faar_signal(seed: int, config: SyntheticConfig | None = None,
                eval_start: str = "2013-06", h: int = 1,
                model: ModelConfig | None = None) -> SignalResult:
    """FAAR/AR out-of-sample MSFE ratios on a factor-loaded and a factor-free target.

    Both targets share one generated corpus: the factor-free target is drawn
    from the same latent stream with the loading set to zero, so only the
    link between the forum and the target differs.
    """
    base = dataclasses.replace(config or SyntheticConfig(), seed=seed)
    forum = generate_synthetic_forum(base)
    months = month_range(base.start, shift_month(base.start, base.months - 1))
    panel = compute_panel(forum.posts, forum.profiles, [forum.target, *forum.trends], months,
                          IndicatorConfig())
    frame = panel.city(base.city).copy()
    null_cfg = dataclasses.replace(
        base, target_dgp=dataclasses.replace(base.target_dgp, factor_loading=0.0))
    null_target = latent_series(null_cfg)["target"]
    eval_months = month_range(eval_start, months[-1])

    def ratio(f) -> float:
        ar = rolling_run(f, "AR", h, eval_months, model)
        faar = rolling_run(f, "FAAR", h, eval_months, model)
        if ar.origins != faar.origins:
            common = sorted(set(ar.origins) & set(faar.origins))
            ar_e = [r.error for r in ar.records if r.origin in common]
            fa_e = [r.error for r in faar.records if r.origin in common]
            return msfe(fa_e) / msfe(ar_e)
        return msfe(faar) / msfe(ar)

    loaded = ratio(frame)
    frame[TARGET] = null_target
    return SignalResult(seed, loaded, ratio(frame))


def mcs_losses(rng: np.random.Generator, n: int = 46, inflation: float = 1.5,
               noise: float = 0.3, identical_pair: bool = True) -> np.ndarray:
    """Losses of three models sharing a common forecast-error component.

    Column 0 is the best model, column 1 either its exact copy or an
    independent model of equal accuracy, column 2 has ``inflation`` times the
    expected loss.
    """
    common = rng.standard_normal(n)
    a = (common + noise * rng.standard_normal(n)) ** 2
    b = a.copy() if identical_pair else (common + noise * rng.standard_normal(n)) ** 2
    c = inflation * (common + noise * rng.standard_normal(n)) ** 2
    return np.column_stack([a, b, c])


@dataclass
class MCSCalibration:
    runs: int
    best_retained: float
    inflated_eliminated: float
    pair_separated: int


def mcs_calibration(runs: int = 200, n: int = 46, n_boot: int = 5000, alpha: float = 0.10,
                    seed: int = 0, identical_pair: bool = True) -> MCSCalibration:
    rng = np.random.default_rng(seed)
    kept = dropped = separated = 0
    for r in range(runs):
        res = model_confidence_set(mcs_losses(rng, n, identical_pair=identical_pair), alpha,
                                   n_boot, seed=seed + r, names=["best", "twin", "inflated"])
        kept += "best" in res.retained
        dropped += "inflated" not in res.retained
        separated += ("best" in res.retained) != ("twin" in res.retained)
    return MCSCalibration(runs, kept / runs, dropped / runs, separated)


@dataclass
class DHCalibration:
    size: float
    size_tilde: float
    power: float


def dh_calibration(reps: int = 500, N: int = 7, T: int = 120, K: int = 1,
                   coefficient: float = 0.5, level: float = 0.05,
                   seed: int = 0) -> DHCalibration:
    """Rejection rates under independence and under ``y_t = c x_{t-1} + e_t``."""
    rng = np.random.default_rng(seed)
    null = null_t = alt = 0
    for _ in range(reps):
        pairs = [(rng.standard_normal(T), rng.standard_normal(T)) for _ in range(N)]
        res = dumitrescu_hurlin(pairs, K)
        null += res.pvalue < level
        null_t += res.pvalue_tilde < level
        linked = []
        for _ in range(N):
            x = rng.standard_normal(T)
            linked.append((np.r_[0.0, coefficient * x[:-1]] + rng.standard_normal(T), x))
        alt += dumitrescu_hurlin(linked, K).pvalue < level
    return DHCalibration(null / reps, null_t / reps, alt / reps)


__all__ = [
    "DHCalibration",
    "MCSCalibration",
    "SignalResult",
    "ar2_recovery",
    "dh_calibration",
    "faar_signal",
    "mcs_calibration",
    "mcs_losses",
]
