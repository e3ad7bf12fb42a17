"""Method dispatch for training and prediction."""

import numpy as np

from ..errors import DimensionMismatchError
from .forest import train_forest
from .linear import train_ridge
from .mlp import train_mlp

_TRAINERS = {
    "ridge": train_ridge,
    "forest": train_forest,
    "mlp": train_mlp,
}


def train(data, subset, cfg):
    """Train a model of the configured method on (data, subset)."""
    cfg.validate()
    return _TRAINERS[cfg.method](data, subset, cfg)


def predict(model, features):
    """Evaluate a trained model on one feature vector or a matrix.

    Args:
        model: any trained model carrying its subset.
        features: sequence of len(subset.members) values, or a 2-D array
            with that many columns.

    Returns:
        float for a single vector, 1-D array for a matrix.

    Raises:
        DimensionMismatchError: wrong width for the model's subset.
    """
    arr = np.asarray(features, dtype=np.float64)
    want = len(model.subset.members)
    if arr.ndim == 1:
        if arr.shape[0] != want:
            raise DimensionMismatchError(
                f"expected {want} features for subset {model.subset.tag}, got {arr.shape[0]}"
            )
        return float(model.predict(arr[None, :])[0])
    if arr.ndim == 2:
        return model.predict(arr)
    raise DimensionMismatchError(f"features must be 1-D or 2-D, got ndim={arr.ndim}")
