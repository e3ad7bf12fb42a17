import math

import numpy as np
import pytest

from txpower import Dataset, FeatureSubset, Sample, TrainConfig, get_subset
from txpower.errors import EmptyDatasetError
from txpower.evaluate import (
    CumulativeErrorCurve,
    FoldPrediction,
    cross_validate,
    cumulative_error,
    ecdf,
    evaluate_grid,
    kfold_indices,
    mae,
    mi_ranking,
    mutual_information,
    mutual_information_from_counts,
    mutual_information_values,
    rmse,
    rsrp_profile,
)

SUBSET_X1 = FeatureSubset("X1", ("velocity",))


def make_sample(**overrides):
    base = dict(
        velocity=50.0, upload_size=3.0, rsrp=-95.0, rsrq=-11.0, sinr=12.0,
        datarate=10.0, rssi=-60.0, freq_band=3, neighbors_intra=2,
        neighbors_inter=1, cell_bandwidth=20.0, tx_power=14.0,
    )
    base.update(overrides)
    return Sample(**base)


class TestErrorMetrics:
    def test_symmetric_miss_scores_its_distance(self):
        y = [0.0, 10.0, 0.0, 10.0]
        pred = [5.0, 5.0, 5.0, 5.0]
        assert rmse(y, pred) == 5.0
        assert mae(y, pred) == 5.0

    def test_rmse_dominates_mae(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            y = rng.normal(size=50)
            pred = rng.normal(size=50)
            assert rmse(y, pred) >= mae(y, pred) - 1e-15

    def test_zero_on_perfect_agreement(self):
        y = [1.5, -2.25, 7.0]
        assert rmse(y, y) == 0.0
        assert mae(y, y) == 0.0


class TestKFold:
    def test_partition_properties(self):
        folds = kfold_indices(23, 5, seed=3)
        sizes = [len(f) for f in folds]
        assert sizes == [5, 5, 5, 4, 4]
        merged = np.concatenate(folds)
        assert len(merged) == 23
        assert set(merged.tolist()) == set(range(23))

    def test_deterministic_in_seed(self):
        a = kfold_indices(40, 4, seed=1)
        b = kfold_indices(40, 4, seed=1)
        c = kfold_indices(40, 4, seed=2)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        assert any(not np.array_equal(x, y) for x, y in zip(a, c))

    def test_rejects_more_folds_than_samples(self):
        with pytest.raises(ValueError):
            kfold_indices(3, 5, seed=0)


class TestCrossValidation:
    def test_perfect_predictor_scores_zero(self):
        # the label is leaked into the feature and every value is
        # duplicated, so a deep tree interpolates each test fold exactly
        samples = []
        for v in range(1, 31):
            for _ in range(10):
                samples.append(make_sample(velocity=float(v), tx_power=float(v)))
        data = Dataset(tuple(samples), "synthetic")
        cfg = TrainConfig(method="forest", n_trees=1, bootstrap=False, max_depth=32, seed=0)
        report, preds = cross_validate(data, SUBSET_X1, cfg, k=5, seed=11)
        cell = report.cell("forest", "X1")
        assert cell.rmse_mean == 0.0
        assert cell.mae_mean == 0.0
        assert cell.k == 5
        assert len(preds) == 5
        covered = np.concatenate([p.test_indices for p in preds])
        assert set(covered.tolist()) == set(range(300))

    def test_grid_produces_one_cell_per_pair(self):
        rng = np.random.default_rng(1)
        samples = tuple(
            make_sample(velocity=float(v), upload_size=float(u), tx_power=float(t))
            for v, u, t in rng.uniform(1.0, 9.0, size=(60, 3))
        )
        data = Dataset(samples, "synthetic")
        subsets = [SUBSET_X1, FeatureSubset("X2", ("velocity", "upload_size"))]
        cfg = TrainConfig(method="ridge", lam=1e-2, n_trees=2, max_depth=4, seed=0)
        report, folds = evaluate_grid(data, ["ridge", "forest"], subsets, cfg, k=3, seed=2)
        assert len(report.cells) == 4
        assert set(folds) == {
            ("ridge", "X1"), ("ridge", "X2"), ("forest", "X1"), ("forest", "X2"),
        }
        assert report.cell("forest", "X2").k == 3
        with pytest.raises(KeyError):
            report.cell("mlp", "X1")
        parsed_cells = report.to_json()
        assert '"cells"' in parsed_cells
        assert len(report.to_text().splitlines()) == 5

    def test_fold_errors_are_signed_true_minus_pred(self):
        fp = FoldPrediction(
            test_indices=np.arange(3),
            y_true=np.array([1.0, 2.0, 3.0]),
            y_pred=np.array([0.5, 2.5, 3.0]),
        )
        assert list(fp.errors()) == [0.5, -0.5, 0.0]


class TestMutualInformation:
    def test_identity_saturates_at_log_bins(self):
        x = np.arange(10.0)
        mi, joint = mutual_information_values(x, x)
        assert abs(mi - math.log(10)) < 1e-12
        assert joint.sum() == 10
        assert np.trace(joint) == 10

    def test_independent_variables_near_zero(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=6000)
        y = rng.normal(size=6000)
        mi, joint = mutual_information_values(x, y)
        assert 0.0 < mi < 0.05
        assert joint.sum() == 6000

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=500)
        y = x + rng.normal(size=500)
        assert abs(mutual_information_values(x, y)[0] - mutual_information_values(y, x)[0]) < 1e-12

    def test_invariant_under_relabeling_bins(self):
        rng = np.random.default_rng(4)
        joint = rng.integers(0, 20, size=(10, 10))
        base = mutual_information_from_counts(joint)
        perm = rng.permutation(10)
        assert abs(mutual_information_from_counts(joint[perm]) - base) < 1e-12
        assert abs(mutual_information_from_counts(joint[:, perm]) - base) < 1e-12

    def test_constant_feature_carries_nothing(self):
        x = np.full(100, 4.2)
        y = np.arange(100.0)
        assert mutual_information_values(x, y)[0] == 0.0

    def test_dataset_api_and_ranking(self):
        rng = np.random.default_rng(5)
        samples = tuple(
            make_sample(rsrp=float(r), tx_power=float(-0.5 * r), velocity=float(v))
            for r, v in zip(rng.uniform(-120, -70, 200), rng.uniform(0, 130, 200))
        )
        data = Dataset(samples, "synthetic")
        est = mutual_information(data, "rsrp")
        assert est.feature == "rsrp"
        assert est.bins == 10
        ranking = mi_ranking(data)
        assert len(ranking) == 11
        assert ranking[0].feature == "rsrp"
        assert all(a.mi >= b.mi for a, b in zip(ranking, ranking[1:]))
        with pytest.raises(ValueError):
            mutual_information(data, "tx_power")


class TestEcdf:
    def test_single_value(self):
        assert ecdf([5.0]) == [(5.0, 1.0)]

    def test_duplicates_merge(self):
        assert ecdf([1.0, 2.0, 2.0, 4.0]) == [(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]

    def test_empty_rejected(self):
        with pytest.raises(EmptyDatasetError):
            ecdf([])


class TestRsrpProfile:
    def test_floor_alignment_and_ci(self):
        samples = (
            make_sample(rsrp=-97.3, upload_size=3.0, tx_power=10.0),
            make_sample(rsrp=-96.0, upload_size=3.0, tx_power=10.0),
            make_sample(rsrp=-95.1, upload_size=3.0, tx_power=10.0),
            make_sample(rsrp=-89.9, upload_size=1.0, tx_power=4.0),
        )
        bins = rsrp_profile(Dataset(samples, "synthetic"))
        assert len(bins) == 2
        crowded = next(b for b in bins if b.count == 3)
        assert crowded.rsrp_bin == -100
        assert crowded.upload_size == 3.0
        assert crowded.mean_tx_power == 10.0
        assert crowded.ci_half_width == 0.0
        lone = next(b for b in bins if b.count == 1)
        assert lone.rsrp_bin == -90
        assert math.isnan(lone.ci_half_width)

    def test_bin_boundary_belongs_to_its_own_bin(self):
        samples = (
            make_sample(rsrp=-95.0, tx_power=1.0),
            make_sample(rsrp=-95.0, tx_power=2.0),
        )
        bins = rsrp_profile(Dataset(samples, "synthetic"))
        assert len(bins) == 1
        assert bins[0].rsrp_bin == -95


class TestCumulativeError:
    def test_zero_errors_stay_zero(self):
        curve = cumulative_error([np.zeros(50)], grid=(1, 4, 16), m_reps=100)
        assert list(curve.e_star) == [0.0, 0.0, 0.0]
        assert list(curve.deviation) == [0.0, 0.0, 0.0]

    def test_constant_bias_never_averages_out(self):
        curve = cumulative_error([np.full(40, -2.0)], grid=(1, 8, 64), m_reps=500)
        assert all(abs(e - 2.0) < 1e-9 for e in curve.e_star)
        assert all(s == 0.0 for s in curve.deviation)

    def test_gaussian_errors_shrink_like_inverse_sqrt(self):
        rng = np.random.default_rng(6)
        errors = rng.normal(0.0, 3.0, size=5000)
        curve = cumulative_error([errors], grid=(8, 64), m_reps=2000, seed=1)
        for l, e, _ in curve.rows():
            expected = 3.0 * math.sqrt(2.0 / (math.pi * l))
            assert abs(e - expected) / expected < 0.15

    def test_accepts_fold_predictions(self):
        fp = FoldPrediction(
            test_indices=np.arange(30),
            y_true=np.linspace(0, 1, 30),
            y_pred=np.linspace(0, 1, 30) + 0.5,
        )
        curve = cumulative_error([fp], grid=(1, 2), m_reps=50)
        assert abs(curve.e_star[0] - 0.5) < 1e-9

    def test_deterministic_in_seed(self):
        rng = np.random.default_rng(7)
        errors = [rng.normal(size=100), rng.normal(size=80)]
        a = cumulative_error(errors, grid=(1, 16), m_reps=200, seed=5)
        b = cumulative_error(errors, grid=(1, 16), m_reps=200, seed=5)
        assert np.array_equal(a.e_star, b.e_star)
        assert np.array_equal(a.deviation, b.deviation)
        assert isinstance(a, CumulativeErrorCurve)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            cumulative_error([np.ones(10)], grid=(4, 2))
        with pytest.raises(ValueError):
            cumulative_error([np.ones(10)], grid=(0, 2))
        with pytest.raises(ValueError):
            cumulative_error([np.ones(10)], grid=(1, 2), m_reps=1)
        with pytest.raises(EmptyDatasetError):
            cumulative_error([np.array([])], grid=(1, 2), m_reps=10)
