"""Model persistence: a self-describing two-line container.

Line 1 is a header with the format tag, version, and the SHA-256 of the
payload. Line 2 is the payload JSON holding method, subset tag, feature
order, scaler statistics, and parameters. Floats are serialized through
Python's repr, so a load reproduces every parameter bit for bit and the
reloaded model predicts identically to the original. Forests are stored
as flat (left, right, threshold_or_value, feature_index) quadruples, one
per node.
"""

import hashlib
import json

import numpy as np

from ..data import FeatureSubset
from ..errors import ChecksumMismatchError, ModelFormatError, VersionMismatchError
from .forest import ForestModel, Tree
from .linear import RidgeModel
from .mlp import MlpModel
from .scaling import Scaler

FORMAT_TAG = "txpower-model"
FORMAT_VERSION = 1


def _scaler_payload(scaler):
    return {"mean": scaler.mean.tolist(), "std": scaler.std.tolist()}


def _scaler_from(payload):
    return Scaler(np.array(payload["mean"]), np.array(payload["std"]))


def _payload(model):
    subset = {"tag": model.subset.tag, "members": list(model.subset.members)}
    if isinstance(model, RidgeModel):
        return {
            "method": "ridge",
            "subset": subset,
            "lam": model.lam,
            "beta": model.beta.tolist(),
            "scaler": _scaler_payload(model.scaler),
        }
    if isinstance(model, ForestModel):
        trees = []
        for tree in model.trees:
            nodes = [
                [int(l), int(r), float(v), int(f)]
                for l, r, v, f in zip(tree.left, tree.right, tree.value, tree.feat)
            ]
            trees.append({"nodes": nodes})
        return {
            "method": "forest",
            "subset": subset,
            "max_depth": model.max_depth,
            "trees": trees,
        }
    if isinstance(model, MlpModel):
        return {
            "method": "mlp",
            "subset": subset,
            "weights": [w.tolist() for w in model.weights],
            "biases": [b.tolist() for b in model.biases],
            "y_mean": model.y_mean,
            "scaler": _scaler_payload(model.scaler),
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def _model_from(payload):
    subset = FeatureSubset(payload["subset"]["tag"], tuple(payload["subset"]["members"]))
    method = payload["method"]
    if method == "ridge":
        return RidgeModel(
            beta=np.array(payload["beta"]),
            lam=payload["lam"],
            scaler=_scaler_from(payload["scaler"]),
            subset=subset,
        )
    if method == "forest":
        trees = []
        for entry in payload["trees"]:
            nodes = entry["nodes"]
            left = np.array([n[0] for n in nodes], dtype=np.int64)
            right = np.array([n[1] for n in nodes], dtype=np.int64)
            value = np.array([n[2] for n in nodes], dtype=np.float64)
            feat = np.array([n[3] for n in nodes], dtype=np.int64)
            trees.append(Tree(left, right, value, feat))
        return ForestModel(trees=trees, subset=subset, max_depth=payload["max_depth"])
    if method == "mlp":
        return MlpModel(
            weights=[np.array(w) for w in payload["weights"]],
            biases=[np.array(b) for b in payload["biases"]],
            scaler=_scaler_from(payload["scaler"]),
            y_mean=payload["y_mean"],
            subset=subset,
        )
    raise ModelFormatError(f"unknown method {method!r}")


def save_model(model, path, meta=None):
    """Write the container; the round trip is exact.

    meta, when given, is embedded verbatim in the payload (tool version,
    seed, config digest) and ignored on load.
    """
    body = _payload(model)
    if meta:
        body["meta"] = meta
    payload = json.dumps(body, separators=(",", ":"))
    digest = hashlib.sha256(payload.encode()).hexdigest()
    header = json.dumps(
        {"format": FORMAT_TAG, "version": FORMAT_VERSION, "sha256": digest},
        separators=(",", ":"),
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n" + payload + "\n")


def load_model(path):
    """Read a container back into its model class.

    Raises:
        ModelFormatError: not a model container.
        VersionMismatchError: unsupported format version.
        ChecksumMismatchError: payload bytes do not match the header
            digest (truncation, corruption, or editing).
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    head, sep, payload = text.partition("\n")
    if not sep:
        raise ModelFormatError(f"{path} is not a model container")
    try:
        header = json.loads(head)
    except json.JSONDecodeError:
        raise ModelFormatError(f"{path} is not a model container")
    if header.get("format") != FORMAT_TAG:
        raise ModelFormatError(f"{path} is not a {FORMAT_TAG} file")
    if header.get("version") != FORMAT_VERSION:
        raise VersionMismatchError(header.get("version"), FORMAT_VERSION)
    payload = payload.rstrip("\n")
    digest = hashlib.sha256(payload.encode()).hexdigest()
    if digest != header.get("sha256"):
        raise ChecksumMismatchError(f"{path}: payload digest mismatch")
    return _model_from(json.loads(payload))
