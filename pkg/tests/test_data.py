import pytest

from txpower import (
    FEATURE_NAMES,
    Dataset,
    Sample,
    canonical_subsets,
    get_subset,
    select_features,
)
from txpower.errors import EmptyDatasetError


def make_sample(**overrides):
    base = dict(
        velocity=50.0, upload_size=3.0, rsrp=-95.0, rsrq=-11.0, sinr=12.0,
        datarate=12.5, rssi=-65.0, freq_band=3, neighbors_intra=2,
        neighbors_inter=1, cell_bandwidth=20.0, tx_power=14.0,
    )
    base.update(overrides)
    return Sample(**base)


class TestSubsets:
    def test_sizes_and_nesting(self):
        subs = canonical_subsets()
        assert subs["S"].members == ("velocity", "upload_size", "rsrp")
        assert len(subs["S"].members) == 3
        assert len(subs["P1"].members) == 5
        assert len(subs["P2"].members) == 6
        assert len(subs["F"].members) == 11
        assert set(subs["S"].members) < set(subs["P1"].members)
        assert set(subs["P1"].members) < set(subs["P2"].members)
        assert set(subs["P2"].members) < set(subs["F"].members)

    def test_datarate_lives_in_p2_only_by_default(self):
        subs = canonical_subsets()
        assert "datarate" not in subs["P1"].members
        assert "datarate" in subs["P2"].members

    def test_datarate_flip(self):
        subs = canonical_subsets(datarate_in_p1=True)
        assert "datarate" in subs["P1"].members
        assert set(subs["P1"].members) == set(subs["P2"].members)

    def test_order_matches_schema_listing(self):
        subs = canonical_subsets()
        for tag in ("F", "P1", "P2", "S"):
            members = subs[tag].members
            positions = [FEATURE_NAMES.index(m) for m in members]
            assert positions == sorted(positions)

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            get_subset("Q")


class TestSelectFeatures:
    def test_s_projection(self):
        s = make_sample(velocity=50.0, upload_size=3.0, rsrp=-95.0)
        assert select_features(s, get_subset("S")) == [50.0, 3.0, -95.0]

    def test_full_has_eleven_values(self):
        assert len(select_features(make_sample(), get_subset("F"))) == 11

    def test_p1_omits_datarate(self):
        s = make_sample(datarate=12.5)
        vec = select_features(s, get_subset("P1"))
        assert len(vec) == 5
        assert 12.5 not in vec

    def test_p1_plus_datarate_equals_p2(self):
        s = make_sample()
        assert select_features(s, get_subset("P1")) + [s.datarate] == select_features(
            s, get_subset("P2")
        )

    def test_s_is_prefix_of_f(self):
        s = make_sample()
        f_vec = select_features(s, get_subset("F"))
        assert select_features(s, get_subset("S")) == f_vec[:3]


class TestDataset:
    def test_rejects_empty(self):
        with pytest.raises(EmptyDatasetError):
            Dataset((), "synthetic")

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Dataset((make_sample(rsrp=float("nan")),), "synthetic")

    def test_rejects_unknown_provenance(self):
        with pytest.raises(ValueError):
            Dataset((make_sample(),), "downloaded")

    def test_rejects_misaligned_metadata(self):
        samples = (make_sample(), make_sample())
        with pytest.raises(ValueError):
            Dataset(samples, "ingested", metadata=({"lat": 1.0},))

    def test_labels_vector(self):
        ds = Dataset(
            tuple(make_sample(tx_power=float(p)) for p in (3, 7, 23)), "synthetic"
        )
        assert list(ds.labels()) == [3.0, 7.0, 23.0]
        assert len(ds) == 3

    def test_feature_matrix_matches_projection(self):
        samples = tuple(make_sample(velocity=float(v)) for v in range(5))
        ds = Dataset(samples, "synthetic")
        sub = get_subset("P2")
        X = ds.feature_matrix(sub)
        assert X.shape == (5, 6)
        for i, s in enumerate(samples):
            assert list(X[i]) == select_features(s, sub)
