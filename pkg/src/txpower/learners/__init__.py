from .config import TrainConfig
from .forest import ForestModel, train_forest
from .io import load_model, save_model
from .linear import RidgeModel, train_ridge
from .mlp import MlpModel, train_mlp
from .predictor import predict, train

__all__ = [
    "TrainConfig",
    "RidgeModel",
    "ForestModel",
    "MlpModel",
    "train_ridge",
    "train_forest",
    "train_mlp",
    "train",
    "predict",
    "save_model",
    "load_model",
]
