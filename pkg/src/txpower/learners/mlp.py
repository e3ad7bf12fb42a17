"""Feed-forward network trained by mini-batch gradient descent.

Fixed architecture [d_in, 64, 64, 64, 1] with rectified linear hidden
units and a linear output. Dropout with rates (0.1, 0.2, 0.3) on the
three hidden layers is applied during training only, with inverted
scaling, so inference runs the plain forward pass. Features are
standardized and labels centered on training statistics.

The per-parameter step divides the base learning rate by the square
root of a gradient-square moving average (decay rho, stabilizer
epsilon), so step sizes adapt to each parameter's gradient scale.
"""

from dataclasses import dataclass

import numpy as np

from .._rand import derive_rng
from ..errors import DimensionMismatchError, TrainingDivergedError
from .scaling import Scaler

HIDDEN_WIDTHS = (64, 64, 64)
DROPOUT_RATES = (0.1, 0.2, 0.3)


def init_params(widths, rng):
    """He-initialized weights (scaled by fan-in) and zero biases."""
    weights = []
    biases = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def forward(weights, biases, Z):
    h = Z
    for W, b in zip(weights[:-1], biases[:-1]):
        h = np.maximum(h @ W + b, 0.0)
    return (h @ weights[-1] + biases[-1])[:, 0]


def loss_and_grads(weights, biases, Z, y, masks=None):
    """MSE loss and its exact gradients for one batch.

    Args:
        weights, biases: per-layer parameter lists.
        Z: standardized batch, shape (n, d_in).
        y: centered targets, shape (n,).
        masks: optional per-hidden-layer dropout masks with inverted
            scaling already applied; None runs the deterministic pass.

    Returns:
        (loss, weight gradients, bias gradients).
    """
    n_layers = len(weights)
    n = Z.shape[0]
    acts = [Z]
    pre = []
    h = Z
    for layer in range(n_layers - 1):
        a = h @ weights[layer] + biases[layer]
        pre.append(a)
        h = np.maximum(a, 0.0)
        if masks is not None:
            h = h * masks[layer]
        acts.append(h)
    out = (h @ weights[-1] + biases[-1])[:, 0]

    r = out - y
    loss = float(r @ r) / n

    d_w = [None] * n_layers
    d_b = [None] * n_layers
    d_out = (2.0 / n) * r[:, None]
    d_w[-1] = acts[-1].T @ d_out
    d_b[-1] = d_out.sum(axis=0)
    d_h = d_out @ weights[-1].T
    for layer in range(n_layers - 2, -1, -1):
        if masks is not None:
            d_h = d_h * masks[layer]
        d_a = d_h * (pre[layer] > 0.0)
        d_w[layer] = acts[layer].T @ d_a
        d_b[layer] = d_a.sum(axis=0)
        if layer > 0:
            d_h = d_a @ weights[layer].T
    return loss, d_w, d_b


@dataclass(eq=False)
class MlpModel:
    weights: list
    biases: list
    scaler: Scaler
    y_mean: float
    subset: object

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.subset.members):
            raise DimensionMismatchError(
                f"expected {len(self.subset.members)} features for subset {self.subset.tag}"
            )
        return forward(self.weights, self.biases, self.scaler.transform(X)) + self.y_mean

    def nominal_parameter_count(self):
        """Size metric with the first-layer bias folded into its weights
        and the remaining layers counted as bare weight matrices."""
        d_in = self.weights[0].shape[0]
        h = HIDDEN_WIDTHS[0]
        return (d_in + 1) * h + h * h + h * h + h


def train_mlp(data, subset, cfg):
    """Train the network on the dataset projected to the subset.

    Deterministic given (data, subset, cfg.seed). Raises
    TrainingDivergedError with the 1-based epoch if the batch loss
    becomes non-finite.
    """
    cfg.validate()
    X = data.feature_matrix(subset)
    y = data.labels()
    n = len(y)
    if n < cfg.batch_size:
        raise ValueError(f"need at least batch_size={cfg.batch_size} samples, got {n}")

    scaler = Scaler.fit(X)
    Z = scaler.transform(X)
    y_mean = float(y.mean())
    yc = y - y_mean

    rng = derive_rng(cfg.seed, "mlp")
    widths = (X.shape[1],) + HIDDEN_WIDTHS + (1,)
    weights, biases = init_params(widths, rng)
    acc_w = [np.zeros_like(w) for w in weights]
    acc_b = [np.zeros_like(b) for b in biases]

    for epoch in range(1, cfg.epochs + 1):
        perm = rng.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            batch = perm[lo : lo + cfg.batch_size]
            masks = [
                (rng.random((len(batch), w.shape[1])) >= p) / (1.0 - p)
                for w, p in zip(weights[:-1], DROPOUT_RATES)
            ]
            loss, d_w, d_b = loss_and_grads(weights, biases, Z[batch], yc[batch], masks)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            for layer in range(len(weights)):
                acc_w[layer] = cfg.rho * acc_w[layer] + (1.0 - cfg.rho) * d_w[layer] ** 2
                acc_b[layer] = cfg.rho * acc_b[layer] + (1.0 - cfg.rho) * d_b[layer] ** 2
                weights[layer] -= cfg.learning_rate * d_w[layer] / (np.sqrt(acc_w[layer]) + cfg.epsilon)
                biases[layer] -= cfg.learning_rate * d_b[layer] / (np.sqrt(acc_b[layer]) + cfg.epsilon)

    return MlpModel(weights=weights, biases=biases, scaler=scaler, y_mean=y_mean, subset=subset)
