"""Command-line front end for the benchmark harness.

Subcommands: split, complexity, compare, ablation, negative-transfer.
Flags mirror the experiment config; a JSON config (or a manifest from a
previous run) can be passed with --config, with explicit flags taking
precedence. Exit status is nonzero iff any dataset was aborted.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

from .bench import (ExperimentConfig, OUTPUT_DIR_ENV, run_ablation, run_comparative,
                    run_complexity, run_negative_transfer, write_outputs)
from .dataset import correlation_split, load_csv
from .version import __version__

log = logging.getLogger("stradaboost")


def _parse_dataset_flag(text):
    """Parse 'name=concrete,path=data/concrete.csv,target=Strength[,split=Cement]'."""
    spec = {}
    for part in text.split(","):
        if "=" not in part:
            raise argparse.ArgumentTypeError(
                "dataset spec pieces must look like key=value, got %r" % part)
        key, value = part.split("=", 1)
        key = key.strip()
        if key not in ("name", "path", "target", "split"):
            raise argparse.ArgumentTypeError(
                "unknown dataset spec key %r (use name, path, target, split)" % key)
        spec[key] = value.strip()
    missing = [k for k in ("name", "path", "target") if k not in spec]
    if missing:
        raise argparse.ArgumentTypeError(
            "dataset spec missing %s in %r" % (", ".join(missing), text))
    return {"name": spec["name"], "path": spec["path"],
            "target_column": spec["target"], "split_feature": spec.get("split")}


def _csv_list(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _float_list(text):
    return [float(part) for part in _csv_list(text)]


def _add_common_flags(sub):
    sub.add_argument("--config", help="JSON experiment config or manifest from a prior run")
    sub.add_argument("--dataset", action="append", type=_parse_dataset_flag,
                     metavar="name=...,path=...,target=...[,split=...]",
                     help="dataset spec; repeat for multiple datasets")
    sub.add_argument("--algorithms", type=_csv_list,
                     help="comma-separated subset of adaboost_r2,ttr2,strada")
    sub.add_argument("--iterations", type=int)
    sub.add_argument("--outer-folds", type=int, dest="outer_folds")
    sub.add_argument("--bins", type=int)
    sub.add_argument("--p", type=int, help="importance-sampled source rows (default ceil(n/2))")
    sub.add_argument("--k", type=int, help="variance-sampling cluster count (default auto)")
    sub.add_argument("--steps", type=int, help="transfer steps S")
    sub.add_argument("--estimators", type=int, help="estimators per step N")
    sub.add_argument("--cv-folds", type=int, dest="cv_folds", help="model-selection folds F")
    sub.add_argument("--alpha", type=float, help="learning rate in (0, 1]")
    sub.add_argument("--loss", choices=("linear", "square", "exponential"))
    sub.add_argument("--alpha-mode", choices=("exponent", "multiplier"), dest="alpha_mode")
    sub.add_argument("--max-depth", type=int, dest="max_depth")
    sub.add_argument("--min-samples-leaf", type=int, dest="min_samples_leaf")
    sub.add_argument("--fractions", type=_float_list,
                     help="target fractions for negative-transfer sweeps, e.g. 0.35,0.63")
    sub.add_argument("--small-target-cutoff", type=int, dest="small_target_cutoff")
    sub.add_argument("--epsilon", type=float, help="complexity residual threshold")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--jobs", type=int, help="parallel worker processes")
    sub.add_argument("--output-dir", dest="output_dir",
                     help="output directory (default $%s or ./results)" % OUTPUT_DIR_ENV)
    sub.add_argument("--no-standardize", action="store_true",
                     help="use raw feature coordinates for sampling distances")
    sub.add_argument("--no-figures", action="store_true",
                     help="skip figure rendering; CSVs are always written")


def _config_from_args(args, parser):
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
        if isinstance(base, dict) and "config" in base and isinstance(base["config"], dict):
            base = base["config"]
    merged = dict(base)
    if args.dataset:
        merged["datasets"] = args.dataset
    for flag, key in (("algorithms", "algorithms"), ("iterations", "iterations"),
                      ("outer_folds", "outer_folds"), ("bins", "bins"),
                      ("p", "p"), ("k", "k"), ("fractions", "target_fractions"),
                      ("small_target_cutoff", "small_target_cutoff"),
                      ("epsilon", "epsilon"), ("seed", "seed"), ("jobs", "jobs"),
                      ("output_dir", "output_dir")):
        value = getattr(args, flag)
        if value is not None:
            merged[key] = value
    strada = dict(merged.get("strada") or {})
    tree = dict(strada.get("tree") or {})
    for flag, key in (("steps", "S"), ("estimators", "N"), ("cv_folds", "F"),
                      ("alpha", "alpha"), ("loss", "loss"), ("alpha_mode", "alpha_mode")):
        value = getattr(args, flag)
        if value is not None:
            strada[key] = value
    for flag in ("max_depth", "min_samples_leaf"):
        value = getattr(args, flag)
        if value is not None:
            tree[flag] = value
    if tree:
        strada["tree"] = tree
    if strada:
        merged["strada"] = strada
    if args.no_standardize:
        merged["standardize_features"] = False
    if args.no_figures:
        merged["render_figures"] = False
    if not merged.get("datasets"):
        parser.error("no datasets given; use --dataset or --config")
    try:
        return ExperimentConfig.from_dict(merged)
    except (KeyError, ValueError) as exc:
        parser.error("bad configuration: %s" % exc)


def _print_summary(table):
    for entry in table.summary:
        keys = [str(entry[k]) for k in ("dataset", "fraction", "algorithm") if k in entry]
        print("%-40s rmse_mean=%.5f rmse_median=%.5f rmse_iqr=%.5f r2_mean=%.4f"
              % (" ".join(keys), entry["rmse_mean"], entry["rmse_median"],
                 entry["rmse_iqr"], entry["r2_mean"]))


def _run_command(args, parser, runner, command):
    config = _config_from_args(args, parser)
    table = runner(config)
    outdir = write_outputs(table, config, command)
    if command == "complexity":
        for row in table.rows:
            print("%-20s c_fe=%.4f d_l=%.4f d_i=%.4f (epsilon=%g)"
                  % (row["dataset"], row["c_fe"], row["d_l"], row["d_i"], row["epsilon"]))
    else:
        _print_summary(table)
    if config.render_figures:
        from .figures import render_for_command
        for path in render_for_command(command, table, outdir):
            print("figure written: %s" % path)
    print("outputs written to %s" % outdir)
    if table.aborted:
        print("aborted datasets: %s" % ", ".join(table.aborted), file=sys.stderr)
        return 1
    return 0


def _write_dataset_csv(ds, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(ds.feature_names) + [ds.target_name])
        for row, target in zip(ds.features, ds.targets):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(target))])


def _cmd_split(args, parser):
    if not args.dataset or len(args.dataset) != 1:
        parser.error("split needs exactly one --dataset")
    spec = args.dataset[0]
    ds = load_csv(spec["path"], spec["target_column"])
    split = correlation_split(ds, spec["split_feature"], bins=args.bins or 3)
    outdir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "results"
    os.makedirs(outdir, exist_ok=True)
    source_path = os.path.join(outdir, "%s_source.csv" % spec["name"])
    target_path = os.path.join(outdir, "%s_target.csv" % spec["name"])
    _write_dataset_csv(split.source, source_path)
    _write_dataset_csv(split.target, target_path)
    print(json.dumps({"dataset": spec["name"],
                      "split_feature": split.split_feature,
                      "bin_edges": [float(e) for e in split.bin_edges],
                      "source_rows": split.source.n,
                      "target_rows": split.target.n,
                      "source_csv": source_path,
                      "target_csv": target_path}, indent=2, sort_keys=True))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stradaboost",
        description="Transfer-regression benchmarks: S-TrAdaBoost.R2, "
                    "two-stage TrAdaBoost.R2, AdaBoost.R2, and dataset "
                    "complexity measures.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_split = sub.add_parser("split", help="split one dataset into source/target CSVs")
    p_split.add_argument("--dataset", action="append", type=_parse_dataset_flag,
                         metavar="name=...,path=...,target=...[,split=...]")
    p_split.add_argument("--bins", type=int)
    p_split.add_argument("--output-dir", dest="output_dir")

    for name, runner, helptext in (
            ("complexity", run_complexity, "dataset complexity table"),
            ("compare", run_comparative, "comparative study"),
            ("ablation", run_ablation, "sampling ablation study"),
            ("negative-transfer", run_negative_transfer,
             "target-fraction sweep of adaboost_r2 vs ttr2")):
        p = sub.add_parser(name, help=helptext)
        _add_common_flags(p)
        p.set_defaults(runner=runner)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "split":
        return _cmd_split(args, parser)
    return _run_command(args, parser, args.runner, args.command)


if __name__ == "__main__":
    sys.exit(main())
