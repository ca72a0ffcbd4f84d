"""Forecasting models and the rolling-window engine."""

from .ar import ARFit, BridgeFit, ar_forecast, fit_ar_bic, fit_bridge_gf, fit_bridge_oth_gf
from .design import DirectDesign, WindowTooShort
from .factor import FactorModelFit, fit_fabm_gf, fit_faar
from .pls import AllPredictorsDegenerate, FactorSet, fit_pls, simpls
from .rolling import (
    HORIZONS,
    MODEL_KINDS,
    ForecastRecord,
    ForecastRun,
    ModelConfig,
    feasible_origins,
    rolling_run,
    run_grid,
)

__all__ = [
    "ARFit",
    "AllPredictorsDegenerate",
    "BridgeFit",
    "DirectDesign",
    "FactorModelFit",
    "FactorSet",
    "ForecastRecord",
    "ForecastRun",
    "HORIZONS",
    "MODEL_KINDS",
    "ModelConfig",
    "WindowTooShort",
    "ar_forecast",
    "feasible_origins",
    "fit_ar_bic",
    "fit_bridge_gf",
    "fit_bridge_oth_gf",
    "fit_fabm_gf",
    "fit_faar",
    "fit_pls",
    "rolling_run",
    "run_grid",
    "simpls",
]
