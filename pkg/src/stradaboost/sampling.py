"""Source-instance sampling: importance selection, k-Center variance
sampling, and assembly of the transfer training pool.

All selection happens in index space against the original source rows so
that provenance stays auditable. Distances default to z-standardized
features with statistics shared across source and target; a flag restores
raw coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, standardize

SOURCE = "source"
TARGET = "target"
SOURCE_AS_TARGET = "source-as-target"

_METRICS = ("euclidean", "manhattan")


@dataclass(frozen=True)
class TrainingPool:
    """Stacked training rows for a transfer fit.

    Rows 0..p-1 are sampled source rows, rows p..p+q-1 are the target
    pool (original target rows, then any variance-sampled source rows
    re-labeled as target). p + q equals the row count.
    """

    X: np.ndarray
    y: np.ndarray
    p: int
    q: int
    provenance: tuple
    source_indices: tuple = ()
    variance_indices: tuple = ()

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("pool X must be 2-D with matching y")
        if self.p < 0 or self.q < 1:
            raise ValueError("need p >= 0 and q >= 1")
        if self.p + self.q != X.shape[0]:
            raise ValueError("p + q must equal the pool row count")
        prov = tuple(self.provenance)
        if len(prov) != X.shape[0]:
            raise ValueError("provenance length must equal the pool row count")
        for i, tag in enumerate(prov):
            if i < self.p:
                if tag != SOURCE:
                    raise ValueError("row %d of the source block tagged %r" % (i, tag))
            elif tag not in (TARGET, SOURCE_AS_TARGET):
                raise ValueError("row %d of the target block tagged %r" % (i, tag))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "provenance", prov)
        object.__setattr__(self, "source_indices", tuple(int(i) for i in self.source_indices))
        object.__setattr__(self, "variance_indices", tuple(int(i) for i in self.variance_indices))

    @property
    def n_rows(self):
        return self.X.shape[0]


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray
    assignment: np.ndarray
    inertia: float

    def __post_init__(self):
        c = np.asarray(self.centroids, dtype=float)
        a = np.asarray(self.assignment, dtype=int)
        if c.ndim != 2 or a.ndim != 1:
            raise ValueError("centroids must be 2-D and assignment 1-D")
        if a.size and (a.min() < 0 or a.max() >= c.shape[0]):
            raise ValueError("assignment indices out of range")
        if self.inertia < 0:
            raise ValueError("inertia must be nonnegative")
        object.__setattr__(self, "centroids", c)
        object.__setattr__(self, "assignment", a)


def _check_metric(metric):
    if metric not in _METRICS:
        raise ValueError("metric must be one of %s, got %r" % (", ".join(_METRICS), metric))
    return metric


def _shared_standardized(source, target):
    """Standardize both feature matrices with statistics fit on their union."""
    stacked = Dataset(np.vstack([source.features, target.features]),
                      np.concatenate([source.targets, target.targets]),
                      source.feature_names, source.target_name)
    _, stats = standardize(stacked)
    zs, _ = standardize(source, stats)
    zt, _ = standardize(target, stats)
    return zs.features, zt.features


def _point_distances(X, point, metric):
    diff = X - point
    if metric == "manhattan":
        return np.abs(diff).sum(axis=1)
    return np.sqrt((diff * diff).sum(axis=1))


def importance_sample(source, target, p, standardize_features=True, metric="euclidean"):
    """Indices of the p source rows nearest the target feature mean.

    Ties on distance go to the lower original index; the result is
    sorted ascending so downstream pools are order-stable.
    """
    _check_metric(metric)
    if source.d != target.d:
        raise ValueError("source and target dimension mismatch")
    n = source.n
    if not 1 <= p <= n:
        raise ValueError("p must satisfy 1 <= p <= %d, got %r" % (n, p))
    if standardize_features:
        src_X, tgt_X = _shared_standardized(source, target)
    else:
        src_X, tgt_X = source.features, target.features
    dist = _point_distances(src_X, tgt_X.mean(axis=0), metric)
    # lexsort: primary key distance, tie-break original index
    order = np.lexsort((np.arange(n), dist))
    return sorted(int(i) for i in order[:p])


def _kmeans_pp_init(X, k, rng):
    """Seeded k-means++ seeding (squared-distance proposal)."""
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = X[first]
    closest = ((X - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # all points coincide with chosen centroids; any pick works
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[j] = X[idx]
        closest = np.minimum(closest, ((X - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(X, k, seed=0, max_iter=100, tol=1e-6):
    """Lloyd's algorithm from a seeded k-means++ start.

    Iterates until the largest centroid shift drops below tol or
    max_iter passes; an emptied cluster seizes the point farthest from
    its current centroid. The returned assignment is a final pure
    nearest-centroid pass so inertia matches the centroids exactly.
    """
    X = np.ascontiguousarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D matrix")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError("k must satisfy 1 <= k <= %d, got %r" % (n, k))
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(X, k, rng)
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        new_centroids = centroids.copy()
        for j in range(k):
            mask = labels == j
            if mask.any():
                new_centroids[j] = X[mask].mean(axis=0)
            else:
                # empty cluster: seize the globally worst-served point
                worst = int(d2[np.arange(n), labels].argmax())
                new_centroids[j] = X[worst]
                labels[worst] = j
        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        if shift < tol:
            break
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return KMeansResult(centroids=centroids, assignment=labels, inertia=inertia)


def _nearest_row(X, point, metric="euclidean"):
    dist = _point_distances(X, point, metric)
    # argmin takes the first minimum, which is the lowest index
    return int(dist.argmin())


def k_center_sample(source, target, k, seed=0, standardize_features=True, metric="euclidean"):
    """Variance-sampling chain: source clusters -> nearest target
    representatives -> nearest source rows.

    Returns deduplicated, ascending source row indices (at most k).
    """
    _check_metric(metric)
    if source.d != target.d:
        raise ValueError("source and target dimension mismatch")
    if not 0 <= k <= source.n:
        raise ValueError("k must satisfy 0 <= k <= %d, got %r" % (source.n, k))
    if k == 0:
        return []
    if standardize_features:
        src_X, tgt_X = _shared_standardized(source, target)
    else:
        src_X, tgt_X = source.features, target.features
    result = kmeans(src_X, k, seed=seed)
    # one target representative per centroid; duplicates retained here
    representatives = [_nearest_row(tgt_X, c, metric) for c in result.centroids]
    chosen = {_nearest_row(src_X, tgt_X[r], metric) for r in representatives}
    return sorted(chosen)


def build_pool(source, target, p, k, seed=0, standardize_features=True, metric="euclidean"):
    """Assemble the transfer pool: p importance-sampled source rows,
    then the m target rows, then variance-sampled source rows re-labeled
    as target. p = 0 skips importance sampling entirely.
    """
    if p == 0:
        src_idx = []
    else:
        src_idx = importance_sample(source, target, p,
                                    standardize_features=standardize_features,
                                    metric=metric)
    var_idx = k_center_sample(source, target, k, seed=seed,
                              standardize_features=standardize_features,
                              metric=metric)
    blocks_X = [source.features[src_idx], target.features, source.features[var_idx]]
    blocks_y = [source.targets[src_idx], target.targets, source.targets[var_idx]]
    X = np.vstack([b.reshape(len(b), source.d) for b in blocks_X])
    y = np.concatenate(blocks_y)
    provenance = ((SOURCE,) * len(src_idx)
                  + (TARGET,) * target.n
                  + (SOURCE_AS_TARGET,) * len(var_idx))
    return TrainingPool(X=X, y=y, p=len(src_idx), q=target.n + len(var_idx),
                        provenance=provenance,
                        source_indices=tuple(src_idx),
                        variance_indices=tuple(var_idx))
