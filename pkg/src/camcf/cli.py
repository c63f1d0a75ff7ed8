"""``camcf`` command line: select, eval, synth."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .data import CamcfConfig, DatasetError
from .evaluation import DEFAULT_GRID, grid_search, kfold_indices, run_protocol, split_indices
from .io import ArffError, load_dataset, write_csv
from .pipeline import run_camcf
from .report import build_report, dumps, validate_report
from .synth import forward_sample, generate_dag, label_node, true_markov_blanket

log = logging.getLogger("camcf")


def _data_args(p):
    p.add_argument("--data", required=True, help="CSV or ARFF dataset")
    p.add_argument("--labels", required=True, help="label count (last n columns) or comma-separated names")
    p.add_argument("--delta1", type=float, default=CamcfConfig.delta1, help="feature-target threshold, bits")
    p.add_argument("--delta2", type=float, default=CamcfConfig.delta2, help="label-label threshold, bits")
    p.add_argument("--k1", type=float, default=CamcfConfig.k1_fraction, help="candidate PC cap, fraction of M")
    p.add_argument("--k2", type=float, default=CamcfConfig.k2_fraction, help="final blanket cap, fraction of M")
    p.add_argument("--gamma", type=float, default=CamcfConfig.gamma)
    p.add_argument("--bins", type=int, default=5, help="equal-frequency bins for real-valued columns")
    p.add_argument("--max-codes", type=int, default=None, help="also bin integer columns with more distinct values")
    p.add_argument("--min-support", type=int, default=CamcfConfig.min_category_support)
    p.add_argument("--max-cond", type=int, default=None, help="cap on conditioning-set size")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--adaptive-thresholds", action="store_true", help="per-category quantile delta1")
    p.add_argument("--dedup-binary", action="store_true", help="only target category 1 of binary labels")
    p.add_argument("--omit-timings", action="store_true", help="leave wall-clock fields null")
    p.add_argument("--out", required=True, help="report path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="camcf", description="Category-level multi-label causal feature selection")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="run feature selection and write a report")
    _data_args(p)

    p = sub.add_parser("eval", help="select on training folds, score ML-kNN on held-out folds")
    _data_args(p)
    p.add_argument("--split", type=float, default=None, help="train fraction (default 0.7)")
    p.add_argument("--cv", type=int, default=None, help="number of cross-validation folds")
    p.add_argument("--knn", type=int, default=10)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--grid", action="store_true", help="tune delta1, delta2, k1, k2 on the protocol")
    p.add_argument("--criterion", default="hamming_loss")

    p = sub.add_parser("synth", help="emit a random network, a sample and its true blankets")
    p.add_argument("--features", type=int, required=True)
    p.add_argument("--label-nodes", type=int, required=True)
    p.add_argument("--edge-prob", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--strong", action="store_true", help="near-deterministic CPT rows")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    return parser


def _config(args) -> CamcfConfig:
    return CamcfConfig(
        delta1=args.delta1,
        delta2=args.delta2,
        k1_fraction=args.k1,
        k2_fraction=args.k2,
        gamma=args.gamma,
        threshold_mode="quantile-adaptive" if args.adaptive_thresholds else "absolute",
        min_category_support=args.min_support,
        seed=args.seed,
        max_conditioning_size=args.max_cond,
        dedup_binary=args.dedup_binary,
        threads=args.threads,
    )


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_select(args) -> dict:
    config = _config(args)
    ds = load_dataset(args.data, args.labels, bins=args.bins, max_codes=args.max_codes)
    t0 = time.perf_counter()
    result = run_camcf(ds, config)
    total = (time.perf_counter() - t0) * 1e3
    report = build_report(
        "select", ds, config, result, path=args.data, total_ms=total, with_timings=not args.omit_timings
    )
    validate_report(report)
    _write(args.out, dumps(report))
    log.info("selected %d of %d features", len(result.global_selected), ds.n_features)
    return report


def _metrics_dict(r):
    return asdict(r)


def cmd_eval(args) -> dict:
    if args.split is not None and args.cv is not None:
        raise DatasetError("--split and --cv are mutually exclusive")
    config = _config(args)
    ds = load_dataset(args.data, args.labels, bins=args.bins, max_codes=args.max_codes)
    if args.cv is not None:
        splits = kfold_indices(ds.n_samples, args.cv, args.seed)
        protocol, train_fraction, folds = "cv", None, args.cv
    else:
        train_fraction = 0.7 if args.split is None else args.split
        splits = split_indices(ds.n_samples, train_fraction, args.seed)
        protocol, folds = "split", None

    t0 = time.perf_counter()
    grid = None
    if args.grid:
        config, per_fold, mean, n = grid_search(
            ds, config, splits, DEFAULT_GRID, args.knn, args.smoothing, args.criterion
        )
        grid = {"criterion": args.criterion, "candidates": n, "best": asdict(config)}
    else:
        per_fold, mean = run_protocol(ds, config, splits, args.knn, args.smoothing)
    result = run_camcf(ds, config)
    total = (time.perf_counter() - t0) * 1e3

    evaluation = {
        "protocol": protocol,
        "train_fraction": train_fraction,
        "folds": folds,
        "seed": args.seed,
        "knn": args.knn,
        "smoothing": args.smoothing,
        "per_fold": [dict(f, metrics=_metrics_dict(f["metrics"])) for f in per_fold],
        "mean": _metrics_dict(mean),
        "grid": grid,
    }
    report = build_report(
        "eval", ds, config, result,
        path=args.data, evaluation=evaluation, total_ms=total, with_timings=not args.omit_timings,
    )
    validate_report(report)
    _write(args.out, dumps(report))
    log.info("mean hamming loss %.4f, macro-F1 %.4f", mean.hamming_loss, mean.macro_f1)
    return report


def cmd_synth(args) -> dict:
    bn = generate_dag(args.features, args.label_nodes, args.edge_prob, args.arity, args.seed, strong=args.strong)
    ds = forward_sample(bn, args.samples, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "network.bn").write_text(bn.to_text(), encoding="utf-8")
    write_csv(ds, out / "data.csv")
    blankets = {
        ds.label_names[i]: {
            "label_index": i,
            "markov_blanket": true_markov_blanket(bn, label_node(bn, i)),
            "names": [ds.feature_names[j] for j in true_markov_blanket(bn, label_node(bn, i))],
        }
        for i in range(ds.n_labels)
    }
    mb = {"n_label_columns": ds.n_labels, "labels": blankets}
    (out / "markov_blankets.json").write_text(json.dumps(mb, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return mb


COMMANDS = {"select": cmd_select, "eval": cmd_eval, "synth": cmd_synth}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (DatasetError, ArffError, OSError, ValueError) as exc:
        print(f"camcf {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
