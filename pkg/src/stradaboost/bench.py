"""Deterministic benchmark harness.

Runs the comparative, ablation, negative-transfer, and complexity
experiments over configured datasets and emits plot-ready CSV tables
plus a JSON manifest that can be fed back in as a config to reproduce
the run byte for byte. Row values never depend on wall time or worker
scheduling; timings are written to their own file so the result tables
stay bitwise reproducible under parallel execution.
"""

from __future__ import annotations

import csv
import functools
import json
import logging
import math
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .boosting import fit_adaboost_r2, predict_weighted_median
from .complexity import complexity_report
from .dataset import _auto_split_feature, correlation_split, kfold, load_csv
from .sampling import build_pool
from .transfer import StradaConfig, fit_strada, fit_ttr2, predict
from .tree import TreeConfig
from .version import __version__

log = logging.getLogger("stradaboost")

ALGORITHMS = ("adaboost_r2", "ttr2", "strada")
OUTPUT_DIR_ENV = "STRADABOOST_OUTPUT_DIR"

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.csv"
TIMINGS_FILE = "timings.csv"
COMPLEXITY_FILE = "complexity.csv"
MANIFEST_FILE = "manifest.json"


@dataclass(frozen=True)
class DatasetSpec:
    """One benchmark dataset: where it lives and how to split it."""

    name: str
    path: str
    target_column: str
    split_feature: str = None

    def to_dict(self):
        return {"name": self.name, "path": self.path,
                "target_column": self.target_column,
                "split_feature": self.split_feature}

    @classmethod
    def from_dict(cls, d):
        return cls(name=d["name"], path=d["path"],
                   target_column=d["target_column"],
                   split_feature=d.get("split_feature"))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; serializes losslessly through the manifest."""

    datasets: tuple
    algorithms: tuple = ALGORITHMS
    strada: StradaConfig = None
    p: int = None
    k: int = None
    iterations: int = 20
    outer_folds: int = 5
    bins: int = 3
    target_fractions: tuple = (0.35, 0.63)
    small_target_cutoff: int = 200
    epsilon: float = 0.1
    seed: int = 0
    output_dir: str = None
    jobs: int = 1
    standardize_features: bool = True
    render_figures: bool = True

    def __post_init__(self):
        specs = tuple(s if isinstance(s, DatasetSpec) else DatasetSpec.from_dict(s)
                      for s in self.datasets)
        if not specs:
            raise ValueError("config needs at least one dataset")
        algs = tuple(self.algorithms)
        unknown = [a for a in algs if a not in ALGORITHMS]
        if unknown or not algs:
            raise ValueError("algorithms must be a nonempty subset of %s" % (ALGORITHMS,))
        if int(self.iterations) < 1:
            raise ValueError("iterations must be >= 1")
        if int(self.outer_folds) < 2:
            raise ValueError("outer_folds must be >= 2")
        fractions = tuple(float(f) for f in self.target_fractions)
        if any(not 0.0 < f < 1.0 for f in fractions):
            raise ValueError("target fractions must lie in (0, 1)")
        if int(self.jobs) < 1:
            raise ValueError("jobs must be >= 1")
        object.__setattr__(self, "datasets", specs)
        object.__setattr__(self, "algorithms", algs)
        object.__setattr__(self, "target_fractions", fractions)
        if self.strada is None:
            object.__setattr__(self, "strada", StradaConfig())

    def to_dict(self):
        s = self.strada
        return {
            "datasets": [d.to_dict() for d in self.datasets],
            "algorithms": list(self.algorithms),
            "strada": {"S": s.S, "N": s.N, "F": s.F, "alpha": s.alpha,
                       "loss": s.loss, "alpha_mode": s.alpha_mode,
                       "tree": {"max_depth": s.tree_config.max_depth,
                                "min_samples_leaf": s.tree_config.min_samples_leaf}},
            "p": self.p, "k": self.k,
            "iterations": self.iterations, "outer_folds": self.outer_folds,
            "bins": self.bins, "target_fractions": list(self.target_fractions),
            "small_target_cutoff": self.small_target_cutoff,
            "epsilon": self.epsilon, "seed": self.seed,
            "output_dir": self.output_dir, "jobs": self.jobs,
            "standardize_features": self.standardize_features,
            "render_figures": self.render_figures,
        }

    @classmethod
    def from_dict(cls, d):
        if "config" in d and isinstance(d["config"], dict):
            d = d["config"]  # accept a manifest as a config
        sd = d.get("strada") or {}
        td = sd.get("tree") or {}
        strada = StradaConfig(
            S=sd.get("S", 30), N=sd.get("N", 50), F=sd.get("F", 10),
            alpha=sd.get("alpha", 0.1), loss=sd.get("loss", "square"),
            alpha_mode=sd.get("alpha_mode", "exponent"),
            tree_config=TreeConfig(max_depth=td.get("max_depth", 3),
                                   min_samples_leaf=td.get("min_samples_leaf", 1)))
        kwargs = {k: d[k] for k in
                  ("p", "k", "iterations", "outer_folds", "bins", "target_fractions",
                   "small_target_cutoff", "epsilon", "seed", "output_dir", "jobs",
                   "standardize_features", "render_figures", "algorithms") if k in d}
        return cls(datasets=tuple(d["datasets"]), strada=strada, **kwargs)


@dataclass(frozen=True)
class ResultTable:
    """Row-level metrics, their summaries, and the (separate) timings."""

    rows: tuple
    summary: tuple
    timings: tuple
    aborted: tuple = ()


def derive_seed(base, *parts):
    """Stable 32-bit cell seed: base seed XOR a checksum of the cell id."""
    tag = "\x1f".join(str(p) for p in parts)
    return (int(base) ^ zlib.crc32(tag.encode("utf-8"))) & 0xFFFFFFFF


def rmse(predictions, actuals):
    pred = np.asarray(predictions, dtype=float)
    act = np.asarray(actuals, dtype=float)
    if pred.shape != act.shape or pred.size == 0:
        raise ValueError("need equal-length nonempty vectors")
    return float(np.sqrt(np.mean((pred - act) ** 2)))


def r_squared(predictions, actuals):
    pred = np.asarray(predictions, dtype=float)
    act = np.asarray(actuals, dtype=float)
    if pred.shape != act.shape or pred.size < 2:
        raise ValueError("need equal-length vectors with at least 2 entries")
    sst = float(((act - act.mean()) ** 2).sum())
    if sst == 0.0:
        raise ValueError("actuals are constant; r-squared undefined")
    sse = float(((act - pred) ** 2).sum())
    return 1.0 - sse / sst


@functools.lru_cache(maxsize=None)
def _split_cached(path, target_column, split_feature, bins):
    ds = load_csv(path, target_column)
    return correlation_split(ds, split_feature, bins=bins)


@functools.lru_cache(maxsize=None)
def _loaded_cached(path, target_column):
    return load_csv(path, target_column)


def _split_column(ds, split_feature):
    if split_feature is None:
        return _auto_split_feature(ds)
    if split_feature not in ds.feature_names:
        raise ValueError("split feature %r not in dataset" % split_feature)
    return ds.feature_names.index(split_feature)


def _fraction_split(ds, col, fraction, train_idx):
    """Partition one iteration's training rows for the negative-transfer
    sweep: the `fraction` share with the lowest split-feature values
    becomes the target sample, the remainder the source."""
    values = ds.features[train_idx, col]
    order = train_idx[np.argsort(values, kind="stable")]
    t_rows = int(round(fraction * order.size))
    t_rows = max(2, min(t_rows, order.size - 1))
    target = ds.take(np.sort(order[:t_rows]))
    source = ds.take(np.sort(order[t_rows:]))
    return source, target


def _effective_p(config, n_source):
    if config.p is not None:
        return int(config.p)
    return math.ceil(0.5 * n_source)


def _effective_k(config, m_train):
    if m_train < config.small_target_cutoff:
        return 0  # too few target rows for variance augmentation
    if config.k is not None:
        return int(config.k)
    return min(10, m_train // 2)


def _sampled_pool(source, train, config, pool_seed):
    return build_pool(source, train, _effective_p(config, source.n),
                      _effective_k(config, train.n), seed=pool_seed,
                      standardize_features=config.standardize_features)


def _unsampled_pool(source, train):
    return build_pool(source, train, p=source.n, k=0)


def _fit_predict_one(algorithm, mode, source, train, test_X, config, cell_parts):
    """Fit one algorithm for one experiment cell; returns test predictions."""
    alg_seed = derive_seed(config.seed, *cell_parts, algorithm)
    pool_seed = derive_seed(config.seed, *cell_parts, "pool")
    strada_cfg = replace(config.strada, seed=alg_seed)
    if algorithm == "adaboost_r2":
        if mode == "ablation":
            pool = _sampled_pool(source, train, config, pool_seed)
            X, y = pool.X, pool.y
        else:
            X, y = train.features, train.targets
        w = np.full(X.shape[0], 1.0 / X.shape[0])
        ensemble = fit_adaboost_r2(X, y, w, strada_cfg.N, strada_cfg.loss,
                                   strada_cfg.tree_config, alg_seed)
        return predict_weighted_median(ensemble, test_X)
    if algorithm == "strada":
        pool = _sampled_pool(source, train, config, pool_seed)
        model = fit_strada(pool, strada_cfg)
    elif algorithm == "ttr2":
        if mode == "ablation":
            pool = _sampled_pool(source, train, config, pool_seed)
        else:
            pool = _unsampled_pool(source, train)
        model = fit_ttr2(pool, strada_cfg)
    else:
        raise ValueError("unknown algorithm %r" % algorithm)
    return predict(model, test_X)


def _run_cell(mode, spec_dict, config_dict, iteration, fraction):
    """One (dataset, fraction, iteration) cell: all algorithms, with metrics.

    Pure function of its arguments, so parallel and sequential schedules
    produce identical rows.
    """
    config = ExperimentConfig.from_dict(config_dict)
    spec = DatasetSpec.from_dict(spec_dict)
    shuffle_round, fold_idx = divmod(iteration, config.outer_folds)
    if mode == "negative":
        # hold the test fold out of the whole dataset, then give the
        # requested share of the remaining rows (lowest split-feature
        # values) to the target sample and the rest to the source
        ds = _loaded_cached(spec.path, spec.target_column)
        col = _split_column(ds, spec.split_feature)
        folds = kfold(ds.n, config.outer_folds,
                      seed=derive_seed(config.seed, spec.name, "negative-outer",
                                       shuffle_round))
        test = ds.take(folds.test_indices(fold_idx))
        source, train = _fraction_split(ds, col, fraction,
                                        folds.train_indices(fold_idx))
        algorithms = ("adaboost_r2", "ttr2")
        cell_parts = (spec.name, "frac", repr(fraction), iteration)
    else:
        split = _split_cached(spec.path, spec.target_column,
                              spec.split_feature, config.bins)
        source, target = split.source, split.target
        algorithms = config.algorithms
        cell_parts = (spec.name, iteration)
        folds = kfold(target.n, config.outer_folds,
                      seed=derive_seed(config.seed, spec.name, "outer",
                                       shuffle_round))
        train = target.take(folds.train_indices(fold_idx))
        test = target.take(folds.test_indices(fold_idx))
    rows, timings = [], []
    for algorithm in algorithms:
        started = time.perf_counter()
        preds = _fit_predict_one(algorithm, mode, source, train, test.features,
                                 config, cell_parts)
        wall = time.perf_counter() - started
        row = {"dataset": spec.name}
        if mode == "negative":
            row["fraction"] = fraction
        row.update({"algorithm": algorithm, "iteration": iteration,
                    "rmse": rmse(preds, test.targets),
                    "r2": r_squared(preds, test.targets)})
        rows.append(row)
        timing = {k: row[k] for k in row if k not in ("rmse", "r2")}
        timing["wall_time_seconds"] = wall
        timings.append(timing)
    return rows, timings


def _cell_worker(payload):
    mode, spec_dict, config_dict, iteration, fraction = payload
    spec_name = spec_dict["name"]
    try:
        rows, timings = _run_cell(mode, spec_dict, config_dict, iteration, fraction)
        return ("ok", spec_name, rows, timings)
    except Exception as exc:  # contained: one bad dataset must not sink the run
        return ("error", spec_name, str(exc), None)


def summarize_rows(rows, group_keys):
    """Mean/median/IQR of rmse and r2 per group, in first-seen group order."""
    groups = {}
    for row in rows:
        key = tuple(row[k] for k in group_keys)
        groups.setdefault(key, []).append(row)
    out = []
    for key, members in groups.items():
        entry = dict(zip(group_keys, key))
        for metric in ("rmse", "r2"):
            vals = np.asarray([m[metric] for m in members], dtype=float)
            q75, q25 = np.percentile(vals, [75, 25])
            entry["%s_mean" % metric] = float(vals.mean())
            entry["%s_median" % metric] = float(np.median(vals))
            entry["%s_iqr" % metric] = float(q75 - q25)
        out.append(entry)
    return out


def _sort_key(mode):
    if mode == "negative":
        return lambda r: (r["dataset"], r["fraction"], r["algorithm"], r["iteration"])
    return lambda r: (r["dataset"], r["algorithm"], r["iteration"])


def _run_experiment(config, mode):
    config_dict = config.to_dict()
    fractions = config.target_fractions if mode == "negative" else (None,)
    tasks = []
    aborted = {}
    for spec in config.datasets:
        # validate load/split once up front so a broken dataset aborts
        # cleanly instead of failing in every cell
        try:
            if mode == "negative":
                ds = _loaded_cached(spec.path, spec.target_column)
                _split_column(ds, spec.split_feature)
            else:
                _split_cached(spec.path, spec.target_column,
                              spec.split_feature, config.bins)
        except Exception as exc:
            log.error("dataset %s aborted: %s", spec.name, exc)
            aborted[spec.name] = str(exc)
            continue
        for fraction in fractions:
            for iteration in range(config.iterations):
                tasks.append((mode, spec.to_dict(), config_dict, iteration, fraction))
    rows, timings = [], []
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(_cell_worker, tasks))
    else:
        outcomes = [_cell_worker(t) for t in tasks]
    for status, spec_name, payload, cell_timings in outcomes:
        if status == "error":
            if spec_name not in aborted:
                log.error("dataset %s aborted: %s", spec_name, payload)
                aborted[spec_name] = payload
            continue
        rows.extend(payload)
        timings.extend(cell_timings)
    rows = [r for r in rows if r["dataset"] not in aborted]
    timings = [t for t in timings if t["dataset"] not in aborted]
    key = _sort_key(mode)
    rows.sort(key=key)
    timings.sort(key=key)
    group_keys = (("dataset", "fraction", "algorithm") if mode == "negative"
                  else ("dataset", "algorithm"))
    summary = summarize_rows(rows, group_keys)
    return ResultTable(rows=tuple(rows), summary=tuple(summary),
                       timings=tuple(timings),
                       aborted=tuple(sorted(aborted)))


def run_comparative(config):
    """Per-dataset comparison: each algorithm under its standard input."""
    return _run_experiment(config, "comparative")


def run_ablation(config):
    """Like run_comparative but every algorithm gets the sampled pool."""
    return _run_experiment(config, "ablation")


def run_negative_transfer(config):
    """Target-fraction sweep of plain AdaBoost.R2 against TTR2.

    Per iteration one outer fold of the full dataset is held out as the
    test set; the remaining rows are the training data, of which the
    configured fraction (the rows with the lowest split-feature values)
    forms the target sample and the rest the source. AdaBoost.R2 trains
    on the target sample only, TTR2 on both, and both are scored on the
    held-out fold.
    """
    return _run_experiment(config, "negative")


def run_complexity(config):
    """Complexity measures per dataset as rows for the complexity table."""
    rows = []
    aborted = {}
    for spec in config.datasets:
        try:
            ds = load_csv(spec.path, spec.target_column)
            report = complexity_report(ds, epsilon=config.epsilon)
            rows.append({"dataset": spec.name, "c_fe": report.c_fe,
                         "d_l": report.d_l, "d_i": report.d_i,
                         "epsilon": report.epsilon})
        except Exception as exc:
            log.error("dataset %s aborted: %s", spec.name, exc)
            aborted[spec.name] = str(exc)
    rows.sort(key=lambda r: r["dataset"])
    return ResultTable(rows=tuple(rows), summary=(), timings=(),
                       aborted=tuple(sorted(aborted)))


def resolve_output_dir(config):
    return config.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "results"


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, fieldnames, rows):
    """CSV with unix newlines and repr floats so reruns match byte for byte."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_format_cell(row.get(f)) for f in fieldnames])


def _fieldnames(rows, preferred):
    present = set()
    for row in rows:
        present.update(row)
    return [f for f in preferred if f in present] or list(preferred)


def write_outputs(table, config, command, output_dir=None):
    """Write results/summary/timings CSVs (or the complexity table) and the
    manifest; returns the output directory."""
    outdir = output_dir or resolve_output_dir(config)
    os.makedirs(outdir, exist_ok=True)
    if command == "complexity":
        write_csv(os.path.join(outdir, COMPLEXITY_FILE),
                  ["dataset", "c_fe", "d_l", "d_i", "epsilon"], table.rows)
    else:
        row_fields = _fieldnames(table.rows, ["dataset", "fraction", "algorithm",
                                              "iteration", "rmse", "r2"])
        write_csv(os.path.join(outdir, RESULTS_FILE), row_fields, table.rows)
        summary_fields = _fieldnames(table.summary,
                                     ["dataset", "fraction", "algorithm",
                                      "rmse_mean", "rmse_median", "rmse_iqr",
                                      "r2_mean", "r2_median", "r2_iqr"])
        write_csv(os.path.join(outdir, SUMMARY_FILE), summary_fields, table.summary)
        timing_fields = _fieldnames(table.timings,
                                    ["dataset", "fraction", "algorithm",
                                     "iteration", "wall_time_seconds"])
        write_csv(os.path.join(outdir, TIMINGS_FILE), timing_fields, table.timings)
    write_manifest(outdir, command, config)
    return outdir


def write_manifest(outdir, command, config):
    payload = {"command": command, "version": __version__,
               "config": config.to_dict()}
    with open(os.path.join(outdir, MANIFEST_FILE), "w") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True))
        fh.write("\n")
