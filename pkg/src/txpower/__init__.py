"""TX-power prediction toolkit.

Learns the hidden LTE uplink transmission power of a device from
passive radio indicators, and ships a power-control-law trace generator
whose ground truth makes every learner and evaluator verifiable.
"""

__version__ = "0.1.0"

from .data import (
    FEATURE_NAMES,
    Dataset,
    FeatureSubset,
    Sample,
    canonical_subsets,
    get_subset,
    select_features,
)
from .generator import GeneratorConfig, SyntheticTrace, bayes_floor, generate
from .ingest import LoadReport, load_csv, write_csv
from .learners import (
    ForestModel,
    MlpModel,
    RidgeModel,
    TrainConfig,
    load_model,
    predict,
    save_model,
    train,
    train_forest,
    train_mlp,
    train_ridge,
)
from .tpc import P_MAX_CLASS3_DBM, TpcParams, tx_power

__all__ = [
    "__version__",
    "FEATURE_NAMES",
    "Sample",
    "FeatureSubset",
    "Dataset",
    "canonical_subsets",
    "get_subset",
    "select_features",
    "TpcParams",
    "tx_power",
    "P_MAX_CLASS3_DBM",
    "GeneratorConfig",
    "SyntheticTrace",
    "generate",
    "bayes_floor",
    "load_csv",
    "write_csv",
    "LoadReport",
    "TrainConfig",
    "RidgeModel",
    "ForestModel",
    "MlpModel",
    "train",
    "train_ridge",
    "train_forest",
    "train_mlp",
    "predict",
    "save_model",
    "load_model",
]
