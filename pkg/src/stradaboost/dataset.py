"""Dataset container, CSV ingestion, standardization, and splitting helpers."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Dataset:
    """A named feature matrix plus target vector.

    features is an (N, d) float matrix, targets a length-N float vector.
    All values must be finite. Instances are treated as immutable after
    construction and may be shared freely across threads.
    """

    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple
    target_name: str

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        targs = np.asarray(self.targets, dtype=float)
        if feats.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        n, d = feats.shape
        if n < 1 or d < 1:
            raise ValueError("dataset needs at least one row and one feature")
        if targs.shape != (n,):
            raise ValueError("targets length %r does not match %d rows" % (targs.shape, n))
        names = tuple(str(f) for f in self.feature_names)
        if len(names) != d:
            raise ValueError("feature_names length %d does not match %d columns" % (len(names), d))
        if not np.all(np.isfinite(feats)) or not np.all(np.isfinite(targs)):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "targets", targs)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    def take(self, indices):
        """Row subset (in the order given) as a new Dataset."""
        idx = np.asarray(indices, dtype=int)
        return Dataset(self.features[idx], self.targets[idx],
                       self.feature_names, self.target_name)


@dataclass(frozen=True)
class TransferSplit:
    """Source/target partition of one dataset by a split feature."""

    source: Dataset
    target: Dataset
    split_feature: str
    bin_edges: np.ndarray

    def __post_init__(self):
        if self.source.feature_names != self.target.feature_names:
            raise ValueError("source and target must share feature names")
        if self.source.target_name != self.target.target_name:
            raise ValueError("source and target must share the target name")
        if self.source.n < self.target.n:
            raise ValueError("source must hold at least as many rows as target")
        object.__setattr__(self, "bin_edges", np.asarray(self.bin_edges, dtype=float))


@dataclass(frozen=True)
class FoldAssignment:
    """Fold index per instance for F-fold cross validation."""

    fold_of: np.ndarray
    F: int

    def __post_init__(self):
        fold_of = np.asarray(self.fold_of, dtype=int)
        if fold_of.ndim != 1 or fold_of.size < self.F:
            raise ValueError("fold_of must be a vector with at least F entries")
        counts = np.bincount(fold_of, minlength=self.F)
        if fold_of.min() < 0 or fold_of.max() >= self.F:
            raise ValueError("fold indices must lie in [0, F)")
        if np.any(counts == 0):
            raise ValueError("every fold must be nonempty")
        if counts.max() - counts.min() > 1:
            raise ValueError("fold sizes may differ by at most 1")
        object.__setattr__(self, "fold_of", fold_of)

    def test_indices(self, fold):
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.fold_of != fold)


def load_csv(path, target_column):
    """Read a comma-delimited, headered, all-numeric CSV into a Dataset.

    Any missing or non-numeric cell is a hard error reporting the row
    number (1-based, header is row 1) and column name.
    """
    if not os.path.exists(path):
        raise FileNotFoundError("no such file: %s" % path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError("%s: empty file" % path) from None
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise ValueError("%s: duplicate column name(s) %s" % (path, ", ".join(dupes)))
        if target_column not in header:
            raise ValueError("%s: target column %r not in header" % (path, target_column))
        tcol = header.index(target_column)
        rows = []
        for rnum, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError("%s: row %d has %d cells, expected %d"
                                 % (path, rnum, len(row), len(header)))
            vals = []
            for cnum, cell in enumerate(row):
                text = cell.strip()
                if text == "":
                    raise ValueError("%s: row %d, column %r: missing value"
                                     % (path, rnum, header[cnum]))
                try:
                    val = float(text)
                except ValueError:
                    raise ValueError("%s: row %d, column %r: non-numeric cell %r"
                                     % (path, rnum, header[cnum], cell)) from None
                if not np.isfinite(val):
                    raise ValueError("%s: row %d, column %r: non-finite value %r"
                                     % (path, rnum, header[cnum], cell))
                vals.append(val)
            rows.append(vals)
    if not rows:
        raise ValueError("%s: no data rows" % path)
    data = np.asarray(rows, dtype=float)
    mask = np.ones(len(header), dtype=bool)
    mask[tcol] = False
    feature_names = tuple(h for i, h in enumerate(header) if i != tcol)
    return Dataset(data[:, mask], data[:, tcol], feature_names, target_column)


def standardize(ds, stats=None):
    """Z-score the feature columns of a dataset.

    Uses the population standard deviation. Zero-variance columns map to
    zero. Returns (standardized dataset, stats) where stats is the
    JSON-ready mapping {feature_name: {"mean": m, "std": s}}; pass it back
    in to transform held-out data with training statistics.
    """
    if stats is None:
        means = ds.features.mean(axis=0)
        stds = ds.features.std(axis=0)
        stats = {name: {"mean": float(m), "std": float(s)}
                 for name, m, s in zip(ds.feature_names, means, stds)}
    else:
        missing = [n for n in ds.feature_names if n not in stats]
        if missing or len(stats) != ds.d:
            raise ValueError("stats do not match dataset features (missing: %s)" % missing)
        means = np.array([stats[n]["mean"] for n in ds.feature_names])
        stds = np.array([stats[n]["std"] for n in ds.feature_names])
    safe = np.where(stds == 0.0, 1.0, stds)
    z = (ds.features - means) / safe
    z[:, stds == 0.0] = 0.0
    return Dataset(z, ds.targets, ds.feature_names, ds.target_name), stats


def pearson_correlation(x, y):
    """Pearson correlation coefficient of two non-constant vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
        raise ValueError("inputs must be 1-D vectors of equal length")
    if x.size < 2:
        raise ValueError("need at least 2 observations")
    xd = x - x.mean()
    yd = y - y.mean()
    denom = np.sqrt((xd * xd).sum() * (yd * yd).sum())
    if denom == 0.0:
        raise ValueError("zero variance input")
    return float(np.clip((xd * yd).sum() / denom, -1.0, 1.0))


def _auto_split_feature(ds):
    # pick the feature whose |r| with the target is closest to 0.5,
    # ties broken by lowest column index; constant columns are skipped
    scores = np.full(ds.d, np.inf)
    for j in range(ds.d):
        col = ds.features[:, j]
        if np.all(col == col[0]):
            continue
        r = pearson_correlation(col, ds.targets)
        scores[j] = abs(abs(r) - 0.5)
    if not np.any(np.isfinite(scores)):
        raise ValueError("no usable split feature: all feature columns are constant")
    return int(np.argmin(scores))


def correlation_split(ds, split_feature=None, bins=3):
    """Partition rows into target (lowest bin) and source (the rest).

    Rows are ranked by the split feature and cut into `bins`
    equal-frequency groups (stable sort; remainder rows go to the last
    bins so the target bin is never the largest). The lowest-value bin
    becomes the target domain, the union of the others the source.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if bins > ds.n:
        raise ValueError("bins (%d) exceeds row count (%d)" % (bins, ds.n))
    if split_feature is None:
        col_idx = _auto_split_feature(ds)
    else:
        if split_feature not in ds.feature_names:
            raise ValueError("split feature %r not in dataset" % split_feature)
        col_idx = ds.feature_names.index(split_feature)
    values = ds.features[:, col_idx]
    if np.all(values == values[0]):
        raise ValueError("split feature %r is constant" % ds.feature_names[col_idx])
    order = np.argsort(values, kind="stable")
    base, rem = divmod(ds.n, bins)
    sizes = [base + (1 if i >= bins - rem else 0) for i in range(bins)]
    edges = [values[order[0]]]
    stop = 0
    for size in sizes:
        stop += size
        edges.append(values[order[stop - 1]])
    target_idx = np.sort(order[:sizes[0]])
    source_idx = np.sort(order[sizes[0]:])
    return TransferSplit(source=ds.take(source_idx), target=ds.take(target_idx),
                         split_feature=ds.feature_names[col_idx],
                         bin_edges=np.asarray(edges, dtype=float))


def kfold(n, F, seed):
    """Seeded uniform shuffle followed by contiguous fold assignment."""
    if F < 2 or F > n:
        raise ValueError("need 2 <= F <= n, got F=%d, n=%d" % (F, n))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    fold_of = np.empty(n, dtype=int)
    base, rem = divmod(n, F)
    start = 0
    for f in range(F):
        size = base + (1 if f < rem else 0)
        fold_of[perm[start:start + size]] = f
        start += size
    return FoldAssignment(fold_of=fold_of, F=F)
