"""Reconstruct annual 37-step grass-growth series from climate data and a
known annual total, by recursively applying trained forecasting models."""

__version__ = "0.1.0"

from .data import (
    AnnualRecord,
    ClimateStep,
    Dataset,
    annual_cumulative,
    load_dataset,
    martonne_index,
    split_by_site,
)
from .engine import (
    DisaggConfig,
    DisaggResult,
    build_training_set,
    disaggregate,
    fit_config,
    initial_values,
    postprocess,
)
from .evaluation import (
    EvalReport,
    evaluate_methods,
    friedman_nemenyi,
    init_ratio_study,
    naive_baseline,
    protocol_configs,
    rmse,
)
from .synthgen import GenParams, PRESETS, generate_dataset, write_dataset
from .transforms import forward, inverse, inverse_diff_with_total

__all__ = [
    "AnnualRecord",
    "ClimateStep",
    "Dataset",
    "DisaggConfig",
    "DisaggResult",
    "EvalReport",
    "GenParams",
    "PRESETS",
    "annual_cumulative",
    "build_training_set",
    "disaggregate",
    "evaluate_methods",
    "fit_config",
    "forward",
    "friedman_nemenyi",
    "generate_dataset",
    "init_ratio_study",
    "initial_values",
    "inverse",
    "inverse_diff_with_total",
    "load_dataset",
    "martonne_index",
    "naive_baseline",
    "postprocess",
    "protocol_configs",
    "rmse",
    "split_by_site",
    "write_dataset",
]
