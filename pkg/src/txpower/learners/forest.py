"""Random forest regression: bagged CART trees, averaged.

Each tree is grown greedily on an N-sample bootstrap of the training
data (exhaustive SSE split search, midpoint thresholds of consecutive
distinct sorted values), stopping at max_depth, below 2 * min_leaf
samples, or zero target variance. Leaf values are the means of their
training targets, so every forest prediction stays inside the training
label range. The forest predicts the arithmetic mean of its trees.
"""

from dataclasses import dataclass

import numpy as np

from .._rand import derive_rng
from ..errors import DimensionMismatchError
from ._tree import eval_tree, grow_tree


@dataclass(eq=False)
class Tree:
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    feat: np.ndarray

    @property
    def n_nodes(self):
        return len(self.left)

    def depth(self):
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        out = 0
        for node in range(self.n_nodes):
            d = depths[node]
            out = max(out, d)
            if self.feat[node] >= 0:
                depths[self.left[node]] = d + 1
                depths[self.right[node]] = d + 1
        return out

    def predict(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.float64)
        eval_tree(self.left, self.right, self.value, self.feat, X, out)
        return out


@dataclass(eq=False)
class ForestModel:
    trees: list
    subset: object
    max_depth: int

    def predict(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.subset.members):
            raise DimensionMismatchError(
                f"expected {len(self.subset.members)} features for subset {self.subset.tag}"
            )
        total = np.zeros(X.shape[0], dtype=np.float64)
        buf = np.empty(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            eval_tree(tree.left, tree.right, tree.value, tree.feat, X, buf)
            total += buf
        return total / len(self.trees)


def train_forest(data, subset, cfg):
    """Grow a forest on the dataset projected to the subset.

    Deterministic given (data, subset, cfg.seed): tree i draws its
    bootstrap rows and split-sampling stream from (seed, "tree", i), so
    results do not depend on execution order.
    """
    cfg.validate()
    X = np.ascontiguousarray(data.feature_matrix(subset))
    y = data.labels()
    n, d = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")

    feature_sample = d if cfg.feature_sample is None else min(cfg.feature_sample, d)
    trees = []
    for i in range(cfg.n_trees):
        rng = derive_rng(cfg.seed, "tree", i)
        rows = rng.integers(0, n, n) if cfg.bootstrap else np.arange(n)
        kernel_seed = int(rng.integers(0, 2**63))
        Xb = np.ascontiguousarray(X[rows])
        yb = y[rows]
        left, right, value, feat = grow_tree(
            Xb, yb, cfg.max_depth, cfg.min_leaf, feature_sample, kernel_seed
        )
        trees.append(Tree(left, right, value, feat))
    return ForestModel(trees=trees, subset=subset, max_depth=cfg.max_depth)
