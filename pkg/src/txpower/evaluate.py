"""Quantitative analyses: cross-validated errors, mutual information,
ECDF, RSRP-binned power profiles, and the cumulative-error Monte Carlo.

Every operation here is deterministic given its seed; all randomness
derives from (seed, component, index) streams.
"""

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from ._rand import derive_rng
from .data import FEATURE_NAMES, Dataset
from .errors import EmptyDatasetError
from .learners.predictor import train as _train

DEFAULT_FOLDS = 10
MI_BINS = 10
CUMERR_REPS = 10_000


def rmse(y_true, y_pred):
    r = np.asarray(y_true, dtype=np.float64) - np.asarray(y_pred, dtype=np.float64)
    return float(np.sqrt(np.mean(r * r)))


def mae(y_true, y_pred):
    r = np.asarray(y_true, dtype=np.float64) - np.asarray(y_pred, dtype=np.float64)
    return float(np.mean(np.abs(r)))


def kfold_indices(n, k, seed):
    """Shuffle 0..n-1 once and cut k folds; the first n mod k folds get
    the extra sample. Union of folds is everything, pairwise disjoint."""
    if n < k:
        raise ValueError(f"need at least k={k} samples, got {n}")
    perm = derive_rng(seed, "cv").permutation(n)
    base = n // k
    extra = n % k
    folds = []
    lo = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(perm[lo : lo + size])
        lo += size
    return folds


@dataclass(frozen=True)
class EvalCell:
    method: str
    subset_tag: str
    k: int
    rmse_mean: float
    rmse_std: float
    mae_mean: float
    mae_std: float


@dataclass(frozen=True)
class FoldPrediction:
    test_indices: np.ndarray
    y_true: np.ndarray
    y_pred: np.ndarray

    def errors(self):
        return self.y_true - self.y_pred


@dataclass(frozen=True)
class EvalReport:
    cells: tuple

    @staticmethod
    def merge(reports):
        cells = []
        for report in reports:
            cells.extend(report.cells)
        return EvalReport(tuple(cells))

    def cell(self, method, subset_tag):
        for c in self.cells:
            if c.method == method and c.subset_tag == subset_tag:
                return c
        raise KeyError(f"no cell for ({method}, {subset_tag})")

    def to_json(self, extra=None):
        body = {
            "cells": [
                {
                    "method": c.method,
                    "subset": c.subset_tag,
                    "folds": c.k,
                    "rmse_mean": c.rmse_mean,
                    "rmse_std": c.rmse_std,
                    "mae_mean": c.mae_mean,
                    "mae_std": c.mae_std,
                }
                for c in self.cells
            ]
        }
        if extra:
            body.update(extra)
        return json.dumps(body, indent=2)

    def to_text(self):
        lines = [f"{'method':<8} {'subset':<6} {'rmse':>16} {'mae':>16}"]
        for c in self.cells:
            lines.append(
                f"{c.method:<8} {c.subset_tag:<6} "
                f"{c.rmse_mean:8.3f} ± {c.rmse_std:5.3f} "
                f"{c.mae_mean:8.3f} ± {c.mae_std:5.3f}"
            )
        return "\n".join(lines)


def cross_validate(data, subset, cfg, k=DEFAULT_FOLDS, seed=0):
    """k-fold cross validation of one (method, subset) cell.

    The dataset is shuffled once by the seed and partitioned; each
    sample lands in exactly one test fold. Per-fold RMSE/MAE aggregate
    into mean and sample standard deviation (ddof 1).

    Returns:
        (EvalReport with one cell, list of per-fold FoldPrediction
        retained for downstream analyses).
    """
    n = len(data)
    folds = kfold_indices(n, k, seed)
    X = data.feature_matrix(subset)
    y = data.labels()

    fold_rmse = np.empty(k)
    fold_mae = np.empty(k)
    predictions = []
    for i, test_idx in enumerate(folds):
        mask = np.ones(n, dtype=bool)
        mask[test_idx] = False
        train_samples = tuple(data.samples[j] for j in np.flatnonzero(mask))
        train_data = Dataset(train_samples, data.provenance)
        model = _train(train_data, subset, cfg)
        y_pred = model.predict(X[test_idx])
        y_true = y[test_idx]
        fold_rmse[i] = rmse(y_true, y_pred)
        fold_mae[i] = mae(y_true, y_pred)
        predictions.append(FoldPrediction(test_idx, y_true, y_pred))

    cell = EvalCell(
        method=cfg.method,
        subset_tag=subset.tag,
        k=k,
        rmse_mean=float(fold_rmse.mean()),
        rmse_std=float(fold_rmse.std(ddof=1)),
        mae_mean=float(fold_mae.mean()),
        mae_std=float(fold_mae.std(ddof=1)),
    )
    return EvalReport((cell,)), predictions


def evaluate_grid(data, methods, subsets, cfg, k=DEFAULT_FOLDS, seed=0):
    """Cross validate every (method, subset) combination.

    Returns:
        (merged EvalReport, dict keyed by (method, subset tag) holding
        each cell's fold predictions).
    """
    reports = []
    folds = {}
    for method in methods:
        method_cfg = replace(cfg, method=method)
        for subset in subsets:
            report, preds = cross_validate(data, subset, method_cfg, k=k, seed=seed)
            reports.append(report)
            folds[(method, subset.tag)] = preds
    return EvalReport.merge(reports), folds


@dataclass(frozen=True)
class MiEstimate:
    feature: str
    mi: float
    bins: int
    joint: np.ndarray


def _bin_indices(values, bins):
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return np.zeros(len(values), dtype=np.int64)
    # maxima land in the last bin
    idx = ((values - lo) / (hi - lo) * bins).astype(np.int64)
    return np.minimum(idx, bins - 1)


def mutual_information_from_counts(joint):
    """Plug-in MI in nats from a joint count table; 0 log 0 is 0."""
    n = joint.sum()
    p = joint / n
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / (px @ py)[mask])))


def mutual_information_values(x, y, bins=MI_BINS):
    """Bin both variables into equal-width bins and estimate MI.

    Returns:
        (mi in nats, joint count table of shape (bins, bins)).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    ix = _bin_indices(x, bins)
    iy = _bin_indices(y, bins)
    joint = np.zeros((bins, bins), dtype=np.int64)
    np.add.at(joint, (ix, iy), 1)
    return mutual_information_from_counts(joint), joint


def mutual_information(data, feature, bins=MI_BINS):
    """MI between one feature and the TX-power label."""
    if feature not in FEATURE_NAMES:
        raise ValueError(f"unknown feature {feature!r}")
    if len(data) < bins:
        raise ValueError(f"need at least {bins} samples, got {len(data)}")
    x = np.array([float(getattr(s, feature)) for s in data.samples])
    mi, joint = mutual_information_values(x, data.labels(), bins)
    return MiEstimate(feature=feature, mi=mi, bins=bins, joint=joint)


def mi_ranking(data, bins=MI_BINS):
    """All features' MI against the label, sorted descending."""
    estimates = [mutual_information(data, f, bins) for f in FEATURE_NAMES]
    return sorted(estimates, key=lambda e: e.mi, reverse=True)


def ecdf(values):
    """Empirical CDF: fraction of samples at or below each distinct value."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) == 0:
        raise EmptyDatasetError("ecdf of nothing")
    uniq, counts = np.unique(values, return_counts=True)
    frac = np.cumsum(counts) / len(values)
    return [(float(v), float(f)) for v, f in zip(uniq, frac)]


@dataclass(frozen=True)
class ProfileBin:
    rsrp_bin: int
    upload_size: float
    mean_tx_power: float
    ci_half_width: float
    count: int


def rsrp_profile(data):
    """Mean TX-power per (5 dB RSRP bin, upload size).

    Bin r covers RSRP values in [r, r+5) with r a multiple of 5 (floor
    alignment, so -97.3 dBm lands in bin -100). The 0.95 confidence
    half-width is 1.96 * s / sqrt(n); bins with fewer than 2 samples
    report no CI (NaN).
    """
    groups = {}
    for s in data.samples:
        r = int(math.floor(s.rsrp / 5.0) * 5.0)
        groups.setdefault((r, s.upload_size), []).append(s.tx_power)
    out = []
    for (r, upload), powers in sorted(groups.items()):
        arr = np.asarray(powers)
        n = len(arr)
        ci = 1.96 * arr.std(ddof=1) / math.sqrt(n) if n >= 2 else float("nan")
        out.append(
            ProfileBin(
                rsrp_bin=r,
                upload_size=upload,
                mean_tx_power=float(arr.mean()),
                ci_half_width=ci,
                count=n,
            )
        )
    return out


def default_cumerr_grid():
    return (1, 2, 4) + tuple(range(8, 257, 4))


@dataclass(frozen=True)
class CumulativeErrorCurve:
    grid: tuple
    e_star: np.ndarray
    deviation: np.ndarray
    m_reps: int

    def rows(self):
        return [
            (l, float(e), float(s))
            for l, e, s in zip(self.grid, self.e_star, self.deviation)
        ]


def cumulative_error(fold_errors, grid=None, m_reps=CUMERR_REPS, seed=0):
    """Monte Carlo of the error accumulated over l predictions.

    For each fold and each l in the grid: draw l indices uniformly with
    replacement from the fold's signed errors, take the signed mean,
    repeat m_reps times, and average the absolute values. The curve
    averages the per-fold results; the deviation column is the per-fold
    standard deviation of the repetition values, averaged over folds.

    Args:
        fold_errors: list of 1-D signed error arrays (y_true - y_pred),
            or of FoldPrediction objects.

    Returns:
        CumulativeErrorCurve over the grid (default {1, 2, 4} then 8 to
        256 in steps of 4).
    """
    if grid is None:
        grid = default_cumerr_grid()
    grid = tuple(int(l) for l in grid)
    if any(l < 1 for l in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing positive counts")
    if m_reps < 2:
        raise ValueError("m_reps must be >= 2")

    errors = []
    for fold in fold_errors:
        e = fold.errors() if isinstance(fold, FoldPrediction) else np.asarray(fold, dtype=np.float64)
        if len(e) == 0:
            raise EmptyDatasetError("cumulative error needs non-empty folds")
        errors.append(e)

    per_fold_e = np.empty((len(errors), len(grid)))
    per_fold_s = np.empty((len(errors), len(grid)))
    for k, e in enumerate(errors):
        rng = derive_rng(seed, "cumerr", k)
        for j, l in enumerate(grid):
            idx = rng.integers(0, len(e), size=(m_reps, l))
            means = np.abs(e[idx].mean(axis=1))
            per_fold_e[k, j] = means.mean()
            per_fold_s[k, j] = means.std(ddof=1)
    return CumulativeErrorCurve(
        grid=grid,
        e_star=per_fold_e.mean(axis=0),
        deviation=per_fold_s.mean(axis=0),
        m_reps=m_reps,
    )
