import hashlib
import json

import numpy as np
import pytest

from txpower import (
    GeneratorConfig,
    TrainConfig,
    generate,
    get_subset,
    load_model,
    predict,
    save_model,
    train,
)
from txpower.errors import (
    ChecksumMismatchError,
    DimensionMismatchError,
    ModelFormatError,
    VersionMismatchError,
)


@pytest.fixture(scope="module")
def trace():
    return generate(GeneratorConfig(n_samples=400, seed=31))


def train_kind(trace, method):
    cfgs = {
        "ridge": TrainConfig(method="ridge", lam=1e-3),
        "forest": TrainConfig(method="forest", n_trees=4, max_depth=8, seed=2),
        "mlp": TrainConfig(method="mlp", epochs=3, batch_size=64, seed=2),
    }
    return train(trace.dataset, get_subset("P1"), cfgs[method])


def probe_inputs(n=1000, d=5, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-120.0, 130.0, size=(n, d))


class TestRoundTrip:
    @pytest.mark.parametrize("method", ["ridge", "forest", "mlp"])
    def test_reloaded_model_predicts_identically(self, trace, method, tmp_path):
        model = train_kind(trace, method)
        path = tmp_path / f"{method}.model"
        save_model(model, str(path))
        clone = load_model(str(path))
        assert type(clone) is type(model)
        assert clone.subset.tag == "P1"
        assert clone.subset.members == model.subset.members
        X = probe_inputs()
        assert np.array_equal(model.predict(X), clone.predict(X))

    def test_forest_payload_stores_one_quadruple_per_node(self, trace, tmp_path):
        model = train_kind(trace, "forest")
        path = tmp_path / "f.model"
        save_model(model, str(path))
        payload = json.loads(path.read_text(encoding="utf-8").splitlines()[1])
        stored = sum(len(t["nodes"]) for t in payload["trees"])
        assert stored == sum(t.n_nodes for t in model.trees)
        for entry in payload["trees"]:
            assert all(len(node) == 4 for node in entry["nodes"])

    def test_meta_embedded_and_ignored(self, trace, tmp_path):
        model = train_kind(trace, "ridge")
        path = tmp_path / "r.model"
        save_model(model, str(path), meta={"tool": "txpower 0.1.0", "seed": 7})
        payload = json.loads(path.read_text(encoding="utf-8").splitlines()[1])
        assert payload["meta"] == {"tool": "txpower 0.1.0", "seed": 7}
        clone = load_model(str(path))
        X = probe_inputs(n=50)
        assert np.array_equal(model.predict(X), clone.predict(X))


class TestIntegrity:
    def test_truncated_payload(self, trace, tmp_path):
        model = train_kind(trace, "ridge")
        path = tmp_path / "r.model"
        save_model(model, str(path))
        header, payload = path.read_text(encoding="utf-8").splitlines()[:2]
        path.write_text(header + "\n" + payload[:-20] + "\n", encoding="utf-8")
        with pytest.raises(ChecksumMismatchError):
            load_model(str(path))

    def test_edited_payload(self, trace, tmp_path):
        model = train_kind(trace, "ridge")
        path = tmp_path / "r.model"
        save_model(model, str(path))
        header, payload = path.read_text(encoding="utf-8").splitlines()[:2]
        path.write_text(header + "\n" + payload.replace("ridge", "RIDGE") + "\n", encoding="utf-8")
        with pytest.raises(ChecksumMismatchError):
            load_model(str(path))

    def test_unsupported_version(self, trace, tmp_path):
        model = train_kind(trace, "ridge")
        path = tmp_path / "r.model"
        save_model(model, str(path))
        _, payload = path.read_text(encoding="utf-8").splitlines()[:2]
        digest = hashlib.sha256(payload.encode()).hexdigest()
        header = json.dumps({"format": "txpower-model", "version": 2, "sha256": digest})
        path.write_text(header + "\n" + payload + "\n", encoding="utf-8")
        with pytest.raises(VersionMismatchError) as exc:
            load_model(str(path))
        assert exc.value.found == 2
        assert exc.value.supported == 1

    def test_foreign_file(self, tmp_path):
        path = tmp_path / "notes.txt"
        path.write_text("just some text\nwith two lines\n", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_single_line_file(self, tmp_path):
        path = tmp_path / "one.model"
        path.write_text("{}", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))


class TestPredictDispatch:
    def test_vector_returns_float(self, trace):
        model = train_kind(trace, "ridge")
        out = predict(model, [50.0, 3.0, -95.0, -11.0, 12.0])
        assert isinstance(out, float)

    def test_matrix_returns_array(self, trace):
        model = train_kind(trace, "ridge")
        X = probe_inputs(n=8)
        out = predict(model, X)
        assert out.shape == (8,)
        # matrix and single-row calls may take different accumulation
        # paths, so agreement is to rounding, not bit-exact
        assert predict(model, X[3]) == pytest.approx(out[3], rel=1e-12, abs=0.0)

    def test_wrong_width_rejected(self, trace):
        model = train_kind(trace, "ridge")
        with pytest.raises(DimensionMismatchError):
            predict(model, [1.0, 2.0])
        with pytest.raises(DimensionMismatchError):
            predict(model, np.ones((2, 2, 2)))
