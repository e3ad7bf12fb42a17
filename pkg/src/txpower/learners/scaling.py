"""Per-feature standardization fitted on training data only."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X):
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        # constant features standardize to 0 instead of dividing by 0
        std = np.where(std > 0.0, std, 1.0)
        return cls(mean, std)

    def transform(self, X):
        return (X - self.mean) / self.std
