"""CSV ingestion and persistence for drive-test traces.

The canonical dataset layout is one header row plus one row per sample:

    velocity_kmh,upload_size_mb,rsrp_dbm,rsrq_db,sinr_db,datarate_mbps,
    rssi_dbm,freq_band,neighbors_intra,neighbors_inter,cell_bw_mhz,
    txpower_dbm

with optional timestamp,lat,lon columns in any position. Lines starting
with '#' are comments and are skipped. Foreign headers are adapted by a
caller-supplied column mapping; no unit conversion is ever attempted.

Filtering applies the capture conventions: a TX-power of exactly 0 dBm
encodes "no activity" and is dropped; rows with unparseable, non-finite,
or out-of-range fields are dropped as invalid. Values above 23 dBm are a
schema or unit error, not physics, and count as invalid.
"""

import csv
import json
import math
from dataclasses import dataclass

from .data import CELL_BANDWIDTHS_MHZ, Dataset, Sample
from .errors import EmptyDatasetError, MissingColumnError

CSV_HEADERS = {
    "velocity": "velocity_kmh",
    "upload_size": "upload_size_mb",
    "rsrp": "rsrp_dbm",
    "rsrq": "rsrq_db",
    "sinr": "sinr_db",
    "datarate": "datarate_mbps",
    "rssi": "rssi_dbm",
    "freq_band": "freq_band",
    "neighbors_intra": "neighbors_intra",
    "neighbors_inter": "neighbors_inter",
    "cell_bandwidth": "cell_bw_mhz",
    "tx_power": "txpower_dbm",
}

METADATA_HEADERS = ("timestamp", "lat", "lon")

_INT_FIELDS = ("freq_band", "neighbors_intra", "neighbors_inter")

PARAMS_CSV_HEADERS = (
    "p_max_dbm",
    "p0_dbm",
    "alpha",
    "path_loss_db",
    "m_rbs",
    "delta_mcs_db",
    "delta_cl_db",
)


@dataclass(frozen=True)
class LoadReport:
    kept: int
    dropped_zero_power: int
    dropped_invalid: int

    @property
    def total(self):
        return self.kept + self.dropped_zero_power + self.dropped_invalid

    def to_json(self):
        return json.dumps(
            {
                "kept": self.kept,
                "dropped_zero_power": self.dropped_zero_power,
                "dropped_invalid": self.dropped_invalid,
            },
            separators=(",", ":"),
        )


def _data_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.reader(line for line in fh if line.strip() and not line.startswith("#"))
        for row in rows:
            yield [cell.strip() for cell in row]


def _parse_row(row, positions):
    values = {}
    for field, pos in positions.items():
        if pos >= len(row):
            return None
        try:
            v = float(row[pos])
        except ValueError:
            return None
        if not math.isfinite(v):
            return None
        if field in _INT_FIELDS:
            if v != int(v):
                return None
            v = int(v)
        values[field] = v
    return values


def _row_valid(values):
    if values["tx_power"] > 23.0:
        return False
    if values["rssi"] < values["rsrp"]:
        return False
    if values["velocity"] < 0.0 or values["upload_size"] <= 0.0 or values["datarate"] < 0.0:
        return False
    if values["freq_band"] < 0 or values["neighbors_intra"] < 0 or values["neighbors_inter"] < 0:
        return False
    if values["cell_bandwidth"] not in CELL_BANDWIDTHS_MHZ:
        return False
    return True


def load_csv(path, schema=None):
    """Load a trace CSV into a Dataset, applying the filtering rules.

    Args:
        path: CSV file with a header row.
        schema: optional mapping from canonical field names to the file's
            header names, for foreign captures. Defaults to the canonical
            headers.

    Returns:
        (Dataset with provenance "ingested", LoadReport). The report
        satisfies kept + dropped_zero_power + dropped_invalid = data rows.

    Raises:
        FileNotFoundError, MissingColumnError, EmptyDatasetError (when
        nothing survives filtering).
    """
    headers = dict(CSV_HEADERS)
    if schema:
        headers.update(schema)

    rows = _data_rows(path)
    try:
        header_row = next(rows)
    except StopIteration:
        raise EmptyDatasetError(f"{path} has no header row")
    index = {name: i for i, name in enumerate(header_row)}

    positions = {}
    for field, header in headers.items():
        if header not in index:
            raise MissingColumnError(header)
        positions[field] = index[header]
    meta_positions = {m: index[m] for m in METADATA_HEADERS if m in index}

    samples = []
    metadata = []
    dropped_zero = 0
    dropped_invalid = 0
    for row in rows:
        values = _parse_row(row, positions)
        if values is None:
            dropped_invalid += 1
            continue
        if values["tx_power"] == 0.0:
            dropped_zero += 1
            continue
        if not _row_valid(values):
            dropped_invalid += 1
            continue
        samples.append(Sample(**values))
        if meta_positions:
            metadata.append({m: row[p] if p < len(row) else "" for m, p in meta_positions.items()})

    report = LoadReport(len(samples), dropped_zero, dropped_invalid)
    if not samples:
        raise EmptyDatasetError(f"no samples left after filtering {path} ({report.to_json()})")
    dataset = Dataset(tuple(samples), "ingested", tuple(metadata) if meta_positions else None)
    return dataset, report


def _fmt(value):
    # repr of a float is the shortest text that parses back to the same bits
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_csv(dataset, path, header_comment=None):
    """Write a Dataset in the canonical layout.

    Round trip stable: loading the written file reproduces every modeled
    field bit for bit. Metadata columns are appended when present.
    """
    if len(dataset.samples) == 0:
        raise EmptyDatasetError("refusing to write an empty dataset")
    for i, s in enumerate(dataset.samples):
        if not s.is_finite():
            raise ValueError(f"sample {i} has a non-finite field")
    fields = list(CSV_HEADERS)
    header = [CSV_HEADERS[f] for f in fields]
    with_meta = dataset.metadata is not None
    if with_meta:
        header += list(METADATA_HEADERS)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, s in enumerate(dataset.samples):
            row = [_fmt(getattr(s, f)) for f in fields]
            if with_meta:
                meta = dataset.metadata[i]
                row += [str(meta.get(m, "")) for m in METADATA_HEADERS]
            writer.writerow(row)


def write_params_csv(params, path, header_comment=None):
    """Write per-sample law parameters (the generator's side channel)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(PARAMS_CSV_HEADERS)
        for p in params:
            writer.writerow(
                [
                    _fmt(p.p_max),
                    _fmt(p.p0),
                    _fmt(p.alpha),
                    _fmt(p.path_loss),
                    str(p.m_rbs),
                    _fmt(p.delta_mcs),
                    _fmt(p.delta_cl),
                ]
            )


def load_params_csv(path):
    """Read a side-channel parameters CSV back into TpcParams tuples."""
    from .tpc import TpcParams

    rows = _data_rows(path)
    header = next(rows)
    index = {name: i for i, name in enumerate(header)}
    for column in PARAMS_CSV_HEADERS:
        if column not in index:
            raise MissingColumnError(column)
    out = []
    for row in rows:
        out.append(
            TpcParams(
                p_max=float(row[index["p_max_dbm"]]),
                p0=float(row[index["p0_dbm"]]),
                alpha=float(row[index["alpha"]]),
                path_loss=float(row[index["path_loss_db"]]),
                m_rbs=int(row[index["m_rbs"]]),
                delta_mcs=float(row[index["delta_mcs_db"]]),
                delta_cl=float(row[index["delta_cl_db"]]),
            )
        )
    return tuple(out)
