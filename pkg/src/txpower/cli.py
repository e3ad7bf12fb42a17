"""Command line entry point.

Subcommands: generate, ingest, train, predict, evaluate, mi, cumerr,
ecdf, profile. Command line flags override values from a JSON config
file (--config); every key has flag parity under its dest name. All
randomness flows from --seed via documented stream derivation, so any
artifact is replayable from the settings it embeds: each written file
carries the tool version, a digest of the resolved configuration, and
the seed. Files are written atomically (temp file, then rename).
"""

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .data import SUBSET_TAGS, get_subset
from .errors import TxPowerError
from .evaluate import (
    cross_validate,
    cumulative_error,
    ecdf,
    evaluate_grid,
    mi_ranking,
    rsrp_profile,
)
from .generator import GeneratorConfig, generate
from .ingest import load_csv, write_csv, write_params_csv
from .learners import TrainConfig, load_model, save_model, train
from .learners.config import METHODS
from .learners.predictor import predict as predict_features

_TRAIN_KEYS = (
    "lam",
    "n_trees",
    "max_depth",
    "min_leaf",
    "bootstrap",
    "feature_sample",
    "epochs",
    "batch_size",
    "learning_rate",
    "rho",
    "epsilon",
)


def _resolve(args, keys):
    """Merge defaults, config file, and flags; flags win.

    argparse stores None for unset flags; a --config JSON supplies those,
    and anything still None falls back to the dataclass defaults later.
    Unknown config keys are rejected.
    """
    resolved = {}
    file_vals = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_vals = json.load(fh)
        unknown = set(file_vals) - set(keys)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in keys:
        flag = getattr(args, key, None)
        resolved[key] = flag if flag is not None else file_vals.get(key)
    return resolved


def _digest(resolved):
    canon = json.dumps(resolved, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _stamp(seed, digest):
    return f"txpower={__version__} seed={seed} config=sha256:{digest}"


def _meta(seed, digest):
    return {"tool_version": __version__, "seed": seed, "config_digest": f"sha256:{digest}"}


def _atomic(path, write_fn):
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def _write_text(path, text):
    def write(tmp):
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)

    _atomic(path, write)


def _write_rows_csv(path, stamp, header, rows):
    def write(tmp):
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(f"# {stamp}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(str(v) for v in row) + "\n")

    _atomic(path, write)


def _train_config(resolved, method, seed):
    overrides = {k: v for k, v in resolved.items() if k in _TRAIN_KEYS and v is not None}
    if "bootstrap" in overrides:
        overrides["bootstrap"] = bool(overrides["bootstrap"])
    return TrainConfig(method=method, seed=seed, **overrides)


def cmd_generate(args):
    keys = (
        "n",
        "seed",
        "shadowing_sigma",
        "delta_cl_sigma",
        "distance_min",
        "distance_max",
        "cell_rb_capacity",
        "upload_sizes",
        "alpha",
        "p0",
    )
    r = _resolve(args, keys)
    seed = r["seed"] if r["seed"] is not None else 0
    uploads = r["upload_sizes"] if r["upload_sizes"] is not None else "1,3,5"
    if isinstance(uploads, str):
        uploads = tuple(float(u) for u in uploads.split(","))
    else:
        uploads = tuple(float(u) for u in uploads)
    cfg = GeneratorConfig(
        n_samples=r["n"] if r["n"] is not None else 6000,
        seed=seed,
        distance_range=(
            r["distance_min"] if r["distance_min"] is not None else 50.0,
            r["distance_max"] if r["distance_max"] is not None else 5000.0,
        ),
        shadowing_sigma=r["shadowing_sigma"] if r["shadowing_sigma"] is not None else 8.0,
        delta_cl_sigma=r["delta_cl_sigma"] if r["delta_cl_sigma"] is not None else 1.0,
        cell_rb_capacity=r["cell_rb_capacity"] if r["cell_rb_capacity"] is not None else 100,
        upload_sizes=uploads,
        p0=r["p0"] if r["p0"] is not None else -100.0,
        alpha=r["alpha"] if r["alpha"] is not None else 0.9,
    )
    digest = _digest({**r, "upload_sizes": list(uploads)})
    trace = generate(cfg)
    stamp = _stamp(seed, digest)
    _atomic(args.out, lambda tmp: write_csv(trace.dataset, tmp, header_comment=stamp))
    if args.truth_out:
        _atomic(
            args.truth_out,
            lambda tmp: write_params_csv(trace.ground_truth, tmp, header_comment=stamp),
        )
    labels = trace.dataset.labels()
    curve = ecdf(labels)
    quartiles = {}
    for q in (0.25, 0.5, 0.75):
        quartiles[q] = next(v for v, f in curve if f >= q)
    print(f"wrote {len(trace.dataset)} samples to {args.out}")
    print(
        "txpower dBm ecdf: "
        f"min {labels.min():.2f}, p25 {quartiles[0.25]:.2f}, p50 {quartiles[0.5]:.2f}, "
        f"p75 {quartiles[0.75]:.2f}, max {labels.max():.2f}"
    )
    return 0


def cmd_ingest(args):
    schema = {}
    for pair in args.map or []:
        canonical, _, header = pair.partition("=")
        if not header:
            raise ValueError(f"--map expects canonical=header, got {pair!r}")
        schema[canonical] = header
    dataset, report = load_csv(args.infile, schema or None)
    if args.out:
        digest = _digest({"infile": args.infile, "map": schema})
        stamp = _stamp(0, digest)
        _atomic(args.out, lambda tmp: write_csv(dataset, tmp, header_comment=stamp))
    print(report.to_json())
    if args.report:
        _write_text(args.report, report.to_json() + "\n")
    return 0


def cmd_train(args):
    keys = ("method", "subset", "seed") + _TRAIN_KEYS
    r = _resolve(args, keys)
    method = r["method"] or "forest"
    seed = r["seed"] if r["seed"] is not None else 0
    subset = get_subset(r["subset"] or "F")
    cfg = _train_config(r, method, seed)
    digest = _digest(r)
    dataset, _ = load_csv(args.infile)
    model = train(dataset, subset, cfg)
    _atomic(args.out, lambda tmp: save_model(model, tmp, meta=_meta(seed, digest)))
    print(f"trained {method} on subset {subset.tag} ({len(dataset)} samples) -> {args.out}")
    return 0


def cmd_predict(args):
    from .ingest import CSV_HEADERS, _data_rows

    model = load_model(args.model)
    rows = _data_rows(args.infile)
    header = next(rows)
    index = {name: i for i, name in enumerate(header)}
    positions = []
    for name in model.subset.members:
        column = CSV_HEADERS[name]
        if column not in index:
            raise TxPowerError(
                f"input lacks column {column} needed by the {model.subset.tag} model"
            )
        positions.append(index[column])
    data_rows = list(rows)
    X = [[float(row[p]) for p in positions] for row in data_rows]
    preds = predict_features(model, X)
    digest = _digest({"model": args.model, "infile": args.infile})
    out_rows = [list(row) + [repr(float(p))] for row, p in zip(data_rows, preds)]
    _write_rows_csv(args.out, _stamp(0, digest), list(header) + ["predicted_txpower_dbm"], out_rows)
    print(f"wrote {len(out_rows)} predictions to {args.out}")
    return 0


def cmd_evaluate(args):
    keys = ("methods", "subsets", "seed", "folds") + _TRAIN_KEYS
    r = _resolve(args, keys)
    seed = r["seed"] if r["seed"] is not None else 0
    folds = r["folds"] if r["folds"] is not None else 10
    methods = (r["methods"] or ",".join(METHODS)).split(",")
    tags = (r["subsets"] or ",".join(SUBSET_TAGS)).split(",")
    subsets = [get_subset(t) for t in tags]
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    cfg = _train_config(r, methods[0], seed)
    digest = _digest(r)
    dataset, _ = load_csv(args.infile)

    report, fold_preds = evaluate_grid(dataset, methods, subsets, cfg, k=folds, seed=seed)
    os.makedirs(args.out, exist_ok=True)
    meta = _meta(seed, digest)
    meta["resolved_config"] = {k: v for k, v in r.items() if v is not None}
    _write_text(os.path.join(args.out, "report.json"), report.to_json(extra=meta) + "\n")
    _write_text(os.path.join(args.out, "report.txt"), report.to_text() + "\n")

    stamp = _stamp(seed, digest)
    ranking = mi_ranking(dataset)
    _write_rows_csv(
        os.path.join(args.out, "mi.csv"),
        stamp,
        ["feature", "mi_nats"],
        [(e.feature, repr(e.mi)) for e in ranking],
    )
    for subset in subsets:
        curve = cumulative_error(fold_preds[(methods[0], subset.tag)], seed=seed)
        _write_rows_csv(
            os.path.join(args.out, f"cumerr_{methods[0]}_{subset.tag}.csv"),
            stamp,
            ["l", "e_star_db", "deviation_db"],
            curve.rows(),
        )
    print(report.to_text())
    return 0


def cmd_mi(args):
    dataset, _ = load_csv(args.infile)
    ranking = mi_ranking(dataset)
    digest = _digest({"infile": args.infile})
    if args.out:
        _write_rows_csv(
            args.out, _stamp(0, digest), ["feature", "mi_nats"], [(e.feature, repr(e.mi)) for e in ranking]
        )
    width = max(len(e.feature) for e in ranking)
    for e in ranking:
        print(f"{e.feature:<{width}}  {e.mi:.4f}")
    return 0


def cmd_cumerr(args):
    keys = ("method", "subset", "seed", "folds", "reps") + _TRAIN_KEYS
    r = _resolve(args, keys)
    seed = r["seed"] if r["seed"] is not None else 0
    folds = r["folds"] if r["folds"] is not None else 10
    method = r["method"] or "forest"
    subset = get_subset(r["subset"] or "F")
    reps = r["reps"] if r["reps"] is not None else 10_000
    cfg = _train_config(r, method, seed)
    dataset, _ = load_csv(args.infile)
    _, preds = cross_validate(dataset, subset, cfg, k=folds, seed=seed)
    curve = cumulative_error(preds, m_reps=reps, seed=seed)
    digest = _digest(r)
    _write_rows_csv(args.out, _stamp(seed, digest), ["l", "e_star_db", "deviation_db"], curve.rows())
    below = [l for l, e, _ in curve.rows() if e < 1.0]
    note = f"E*_l < 1 dB from l = {below[0]}" if below else "E*_l stays >= 1 dB"
    print(f"wrote {len(curve.grid)} grid points to {args.out} ({note})")
    return 0


def cmd_ecdf(args):
    dataset, _ = load_csv(args.infile)
    curve = ecdf(dataset.labels())
    digest = _digest({"infile": args.infile})
    _write_rows_csv(
        args.out,
        _stamp(0, digest),
        ["txpower_dbm", "fraction"],
        [(repr(v), repr(f)) for v, f in curve],
    )
    print(f"wrote {len(curve)} ecdf points to {args.out}")
    return 0


def cmd_profile(args):
    dataset, _ = load_csv(args.infile)
    bins = rsrp_profile(dataset)
    digest = _digest({"infile": args.infile})
    _write_rows_csv(
        args.out,
        _stamp(0, digest),
        ["rsrp_bin_dbm", "upload_size_mb", "mean_txpower_dbm", "ci_half_width_db", "count"],
        [
            (b.rsrp_bin, repr(b.upload_size), repr(b.mean_tx_power), repr(b.ci_half_width), b.count)
            for b in bins
        ],
    )
    print(f"wrote {len(bins)} profile bins to {args.out}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(prog="txpower", description=__doc__)
    parser.add_argument("--version", action="version", version=f"txpower {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, infile=True, out_required=True, seed=False, config=False):
        if infile:
            p.add_argument("--in", dest="infile", required=True, help="input dataset CSV")
        p.add_argument("--out", required=out_required, help="output path")
        if seed:
            p.add_argument("--seed", type=int, help="global seed (default 0)")
        if config:
            p.add_argument("--config", help="JSON config file; flags override its keys")

    p = sub.add_parser("generate", help="generate a synthetic labeled trace")
    add_common(p, infile=False, seed=True, config=True)
    p.add_argument("--n", type=int, help="sample count (default 6000)")
    p.add_argument("--truth-out", dest="truth_out", help="side-channel law parameters CSV")
    p.add_argument("--shadowing-sigma", dest="shadowing_sigma", type=float)
    p.add_argument("--delta-cl-sigma", dest="delta_cl_sigma", type=float)
    p.add_argument("--distance-min", dest="distance_min", type=float)
    p.add_argument("--distance-max", dest="distance_max", type=float)
    p.add_argument("--cell-rb-capacity", dest="cell_rb_capacity", type=int)
    p.add_argument("--upload-sizes", dest="upload_sizes", help="comma list of MB values")
    p.add_argument("--alpha", type=float)
    p.add_argument("--p0", type=float)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("ingest", help="load, filter, and normalize a trace CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", help="write the filtered dataset in canonical layout")
    p.add_argument("--report", help="write the load report JSON here too")
    p.add_argument("--map", action="append", help="canonical=header column mapping, repeatable")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train one model and save it")
    add_common(p, seed=True, config=True)
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--subset", choices=SUBSET_TAGS)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="append model predictions to a feature CSV")
    p.add_argument("--model", required=True, help="model file from train")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="cross-validated error grid plus analysis curves")
    add_common(p, seed=True, config=True)
    p.add_argument("--methods", help="comma list (default all three)")
    p.add_argument("--subsets", help="comma list of subset tags (default all four)")
    p.add_argument("--folds", type=int)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("mi", help="mutual information ranking of all features")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("cumerr", help="cumulative-error Monte Carlo for one cell")
    add_common(p, seed=True, config=True)
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--subset", choices=SUBSET_TAGS)
    p.add_argument("--folds", type=int)
    p.add_argument("--reps", type=int, help="Monte Carlo repetitions (default 10000)")
    p.set_defaults(func=cmd_cumerr)

    p = sub.add_parser("ecdf", help="ECDF of the TX-power labels")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ecdf)

    p = sub.add_parser("profile", help="mean TX-power per RSRP bin and upload size")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profile)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TxPowerError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
