"""Dataset schema, feature subsets, and projections.

A Sample carries the 11 passive indicator features plus the TX-power
label. Four canonical feature subsets are exposed:

    S  = {velocity, upload_size, rsrp}            simulation inputs
    P1 = S  + {rsrq, sinr}                        practical, idle probing
    P2 = P1 + {datarate}                          practical, active traffic
    F  = all 11 features                          full capture

Member order is the schema listing order restricted to the subset, is
identical between training and inference, and is serialized with every
exported model.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDatasetError

FEATURE_NAMES = (
    "velocity",
    "upload_size",
    "rsrp",
    "rsrq",
    "sinr",
    "datarate",
    "rssi",
    "freq_band",
    "neighbors_intra",
    "neighbors_inter",
    "cell_bandwidth",
)

CELL_BANDWIDTHS_MHZ = (1.4, 3.0, 5.0, 10.0, 15.0, 20.0)

SUBSET_TAGS = ("F", "P1", "P2", "S")

_ALL_FIELDS = FEATURE_NAMES + ("tx_power",)


@dataclass(frozen=True)
class Sample:
    """One observation: indicator features plus the TX-power label.

    velocity km/h, upload_size MB, rsrp/rssi dBm, rsrq/sinr dB,
    datarate Mbit/s, cell_bandwidth MHz, tx_power dBm. freq_band is the
    integer band code treated as a numeric feature; the neighbor fields
    count intra and inter frequency neighbor cells.
    """

    velocity: float
    upload_size: float
    rsrp: float
    rsrq: float
    sinr: float
    datarate: float
    rssi: float
    freq_band: int
    neighbors_intra: int
    neighbors_inter: int
    cell_bandwidth: float
    tx_power: float

    def is_finite(self):
        return all(math.isfinite(getattr(self, name)) for name in _ALL_FIELDS)


@dataclass(frozen=True)
class FeatureSubset:
    tag: str
    members: tuple


def canonical_subsets(datarate_in_p1=False):
    """The four canonical subsets keyed by tag.

    Args:
        datarate_in_p1: move datarate from P2 into P1 (an alternative
            reading of the subset table; default keeps it in P2 only).

    Returns:
        dict mapping tag to FeatureSubset, member order fixed.
    """
    s = ("velocity", "upload_size", "rsrp")
    p1 = s + ("rsrq", "sinr")
    if datarate_in_p1:
        p1 = p1 + ("datarate",)
        p2 = p1
    else:
        p2 = p1 + ("datarate",)
    return {
        "F": FeatureSubset("F", FEATURE_NAMES),
        "P1": FeatureSubset("P1", p1),
        "P2": FeatureSubset("P2", p2),
        "S": FeatureSubset("S", s),
    }


def get_subset(tag, datarate_in_p1=False):
    subsets = canonical_subsets(datarate_in_p1)
    if tag not in subsets:
        raise ValueError(f"unknown subset tag {tag!r}, expected one of {SUBSET_TAGS}")
    return subsets[tag]


def select_features(sample, subset):
    """Project a sample onto a subset's members, label excluded.

    Pure projection: the values appear in the subset's fixed order.
    """
    return [float(getattr(sample, name)) for name in subset.members]


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of samples.

    provenance is "synthetic" or "ingested". metadata optionally carries
    pass-through fields (timestamp, lat, lon) aligned with samples; it is
    never part of the modeling schema.
    """

    samples: tuple
    provenance: str
    metadata: tuple = None

    def __post_init__(self):
        if len(self.samples) == 0:
            raise EmptyDatasetError("dataset must contain at least one sample")
        if self.provenance not in ("synthetic", "ingested"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        for i, s in enumerate(self.samples):
            if not s.is_finite():
                raise ValueError(f"sample {i} has a non-finite field")
        if self.metadata is not None and len(self.metadata) != len(self.samples):
            raise ValueError("metadata must align with samples")

    def __len__(self):
        return len(self.samples)

    def labels(self):
        return np.array([s.tx_power for s in self.samples], dtype=np.float64)

    def feature_matrix(self, subset):
        out = np.empty((len(self.samples), len(subset.members)), dtype=np.float64)
        for j, name in enumerate(subset.members):
            out[:, j] = [getattr(s, name) for s in self.samples]
        return out
