"""Forecast accuracy, model confidence sets, panel causality and weight analysis."""

from .granger import DHResult, dumitrescu_hurlin, unit_wald, z_statistics
from .mcs import MCSResult, bootstrap_indices, default_block_length, model_confidence_set
from .metrics import (
    LossSeries,
    MisalignedRuns,
    common_losses,
    msfe,
    relative_mse,
    restrict,
    rmse,
)
from .tables import (
    ACCURACY_COLUMNS,
    GRANGER_COLUMNS,
    WEIGHT_COLUMNS,
    accuracy_table,
    granger_table,
    load_table4_fixture,
    weight_table,
    write_table,
)
from .weights import WeightQuartileTable, quartile_labels, step_magnitudes, weight_quartiles

__all__ = [
    "ACCURACY_COLUMNS",
    "DHResult",
    "GRANGER_COLUMNS",
    "LossSeries",
    "MCSResult",
    "MisalignedRuns",
    "WEIGHT_COLUMNS",
    "WeightQuartileTable",
    "accuracy_table",
    "bootstrap_indices",
    "common_losses",
    "default_block_length",
    "dumitrescu_hurlin",
    "granger_table",
    "load_table4_fixture",
    "model_confidence_set",
    "msfe",
    "quartile_labels",
    "relative_mse",
    "restrict",
    "rmse",
    "step_magnitudes",
    "unit_wald",
    "weight_quartiles",
    "weight_table",
    "write_table",
    "z_statistics",
]
