"""Training configuration shared by all three methods."""

from dataclasses import dataclass

METHODS = ("ridge", "forest", "mlp")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run.

    Ridge uses lam (regularization strength). The forest uses n_trees,
    max_depth, min_leaf, bootstrap, and feature_sample (features scanned
    per split; None scans all). The MLP uses epochs, batch_size,
    learning_rate, and the adaptive-step constants rho and epsilon.
    seed drives every random choice.
    """

    method: str = "forest"
    lam: float = 1e-3
    n_trees: int = 64
    max_depth: int = 32
    min_leaf: int = 1
    bootstrap: bool = True
    feature_sample: int = None
    epochs: int = 200
    batch_size: int = 32
    learning_rate: float = 1e-3
    rho: float = 0.99
    epsilon: float = 1e-8
    seed: int = 0

    def validate(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.lam < 0.0:
            raise ValueError("lam must be >= 0")
        for name in ("n_trees", "max_depth", "min_leaf", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.feature_sample is not None and self.feature_sample < 1:
            raise ValueError("feature_sample must be >= 1 when set")
        if self.learning_rate <= 0.0 or self.epsilon <= 0.0:
            raise ValueError("learning_rate and epsilon must be > 0")
        if not (0.0 <= self.rho < 1.0):
            raise ValueError("rho must lie in [0, 1)")
