"""Figure rendering for benchmark tables.

Renders matplotlib summaries next to the CSV outputs. Figures are a
convenience view only; the CSVs stay the deterministic record (PNG
encoding is not byte-stable across library versions).
"""

from __future__ import annotations

import os
from collections import OrderedDict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _grouped(rows, outer_key, inner_key, value_key):
    """rows -> {outer: {inner: [values...]}} preserving first-seen order."""
    out = OrderedDict()
    for row in rows:
        inner = out.setdefault(row[outer_key], OrderedDict())
        inner.setdefault(row[inner_key], []).append(row[value_key])
    return out

def render_metric_boxplot(rows, path, metric="rmse"):
    """One panel per dataset, one box per algorithm."""
    if not rows:
        return None
    data = _grouped(rows, "dataset", "algorithm", metric)
    fig, axes = plt.subplots(1, len(data), figsize=(4 * len(data), 4),
                             squeeze=False, sharey=False)
    for ax, (dataset, by_alg) in zip(axes[0], data.items()):
        ax.boxplot(list(by_alg.values()))
        ax.set_xticks(range(1, len(by_alg) + 1))
        ax.set_xticklabels(list(by_alg.keys()))
        ax.set_title(dataset)
        ax.set_ylabel(metric)
        ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_negative_transfer(rows, path, metric="rmse"):
    """Mean metric vs target fraction, one line per algorithm per dataset."""
    if not rows:
        return None
    by_dataset = _grouped(rows, "dataset", "algorithm", metric)
    fig, axes = plt.subplots(1, len(by_dataset), figsize=(4.5 * len(by_dataset), 4),
                             squeeze=False)
    for ax, dataset in zip(axes[0], by_dataset):
        ds_rows = [r for r in rows if r["dataset"] == dataset]
        algorithms = list(OrderedDict.fromkeys(r["algorithm"] for r in ds_rows))
        fractions = sorted({r["fraction"] for r in ds_rows})
        for algorithm in algorithms:
            means = []
            for fraction in fractions:
                vals = [r[metric] for r in ds_rows
                        if r["algorithm"] == algorithm and r["fraction"] == fraction]
                means.append(sum(vals) / len(vals))
            ax.plot(fractions, means, marker="o", label=algorithm)
        ax.set_title(dataset)
        ax.set_xlabel("target fraction of training data")
        ax.set_ylabel("mean %s" % metric)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_complexity(rows, path):
    """Grouped bars of the three complexity measures per dataset."""
    if not rows:
        return None
    datasets = [r["dataset"] for r in rows]
    measures = ("c_fe", "d_l", "d_i")
    fig, ax = plt.subplots(figsize=(1.8 * len(datasets) + 3, 4))
    width = 0.25
    for i, measure in enumerate(measures):
        xs = [j + (i - 1) * width for j in range(len(datasets))]
        ax.bar(xs, [r[measure] for r in rows], width=width, label=measure)
    ax.set_xticks(range(len(datasets)))
    ax.set_xticklabels(datasets, rotation=20)
    ax.set_ylabel("measure value")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_for_command(command, table, outdir):
    """Render whichever figures suit the finished command's table."""
    written = []
    if command in ("compare", "ablation"):
        for metric in ("rmse", "r2"):
            out = render_metric_boxplot(table.rows,
                                        os.path.join(outdir, "%s_boxplot.png" % metric),
                                        metric)
            if out:
                written.append(out)
    elif command == "negative-transfer":
        out = render_negative_transfer(table.rows,
                                       os.path.join(outdir, "negative_transfer.png"))
        if out:
            written.append(out)
    elif command == "complexity":
        out = render_complexity(table.rows, os.path.join(outdir, "complexity.png"))
        if out:
            written.append(out)
    return written
