"""Ridge regression via the regularized normal equations.

Minimizes  lam * ||w||^2 + (1/N) * sum_i (y_i - <w, z_i> - b)^2  over the
standardized feature matrix, with the bias b left unregularized. The
minimizer solves ((A^T A)/N + lam * D) beta = (A^T y)/N, where A is the
design matrix with a trailing ones column and D zeroes out the bias row.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError, SingularSystemError
from .scaling import Scaler

GRAD_TOL = 1e-8


def design_matrix(Z):
    return np.hstack([Z, np.ones((Z.shape[0], 1))])


def ridge_objective(beta, A, y, lam):
    r = y - A @ beta
    return lam * float(beta[:-1] @ beta[:-1]) + float(r @ r) / len(y)


def ridge_gradient(beta, A, y, lam):
    n = len(y)
    g = -2.0 / n * (A.T @ (y - A @ beta))
    g[:-1] += 2.0 * lam * beta[:-1]
    return g


@dataclass(eq=False)
class RidgeModel:
    beta: np.ndarray
    lam: float
    scaler: Scaler
    subset: object

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.subset.members):
            raise DimensionMismatchError(
                f"expected {len(self.subset.members)} features for subset {self.subset.tag}"
            )
        Z = self.scaler.transform(X)
        return Z @ self.beta[:-1] + self.beta[-1]


def train_ridge(data, subset, cfg):
    """Fit the exact minimizer of the regularized least squares loss.

    Args:
        data: Dataset with at least 2 samples.
        subset: FeatureSubset selecting the inputs.
        cfg: TrainConfig; only cfg.lam is used.

    Returns:
        RidgeModel whose objective gradient norm is below
        1e-8 * (1 + ||beta||).

    Raises:
        SingularSystemError: rank-deficient system, possible only at lam 0.
    """
    cfg.validate()
    X = data.feature_matrix(subset)
    y = data.labels()
    n = len(y)
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")

    scaler = Scaler.fit(X)
    A = design_matrix(scaler.transform(X))
    d1 = A.shape[1]
    reg = cfg.lam * np.eye(d1)
    reg[-1, -1] = 0.0
    G = (A.T @ A) / n + reg
    b = (A.T @ y) / n

    try:
        beta = np.linalg.solve(G, b)
        # one refinement pass cleans up the residual of the direct solve
        for _ in range(3):
            grad = ridge_gradient(beta, A, y, cfg.lam)
            if np.linalg.norm(grad) < GRAD_TOL * (1.0 + np.linalg.norm(beta)):
                break
            beta += np.linalg.solve(G, b - G @ beta)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"normal equations not solvable at lam={cfg.lam}: {exc}")

    grad = ridge_gradient(beta, A, y, cfg.lam)
    if not np.linalg.norm(grad) < GRAD_TOL * (1.0 + np.linalg.norm(beta)):
        raise SingularSystemError(
            f"gradient norm {np.linalg.norm(grad):.3e} after refinement, system is ill conditioned"
        )
    return RidgeModel(beta=beta, lam=cfg.lam, scaler=scaler, subset=subset)
