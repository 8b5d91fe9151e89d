"""Weighted CART regression tree, the weak learner behind all boosting here.

Two interchangeable fitting kernels are kept: a vectorized numpy
reference and a numba-compiled twin used automatically when numba is
importable. Both implement the same greedy rule: each split maximizes
weighted-variance reduction, thresholds are midpoints between
consecutive distinct sorted feature values, and ties break to the
lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    _HAVE_NUMBA = False

PURITY_TOL = 1e-12


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 3
    min_samples_leaf: int = 1

    def __post_init__(self):
        if int(self.max_depth) < 0:
            raise ValueError("max_depth must be >= 0")
        if int(self.min_samples_leaf) < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        object.__setattr__(self, "max_depth", int(self.max_depth))
        object.__setattr__(self, "min_samples_leaf", int(self.min_samples_leaf))


@dataclass(frozen=True)
class RegressionTree:
    """Flat node-array form of a fitted tree.

    feature[i] < 0 marks node i as a leaf carrying value[i]; internal
    nodes route rows left iff x[feature] <= threshold.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int
    config: TreeConfig = field(default_factory=TreeConfig)

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    def depth(self):
        def walk(node):
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))

        return walk(0)


def _node_stats(y, w):
    wsum = w.sum()
    if wsum > 0.0:
        wy = (w * y).sum()
        wy2 = (w * y * y).sum()
        mean = float(wy / wsum)
        sse = max(float(wy2 - wy * wy / wsum), 0.0)
        mse = sse / wsum
    else:
        # all-zero weight subsets still need a finite leaf value
        mean = float(y.mean())
        mse = 0.0
    return mean, mse


def _best_split_numpy(X, y, w, min_samples_leaf):
    """Exhaustive scan over features and midpoints; strict-improvement
    comparison yields the lowest-feature, lowest-threshold tie-break."""
    n = X.shape[0]
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="mergesort")
        sx = X[order, j]
        sy = y[order]
        sw = w[order]
        cw = np.cumsum(sw)
        cwy = np.cumsum(sw * sy)
        cwy2 = np.cumsum(sw * sy * sy)
        tw, twy, twy2 = cw[-1], cwy[-1], cwy2[-1]
        for i in range(n - 1):
            if sx[i] == sx[i + 1]:
                continue
            if i + 1 < min_samples_leaf or n - i - 1 < min_samples_leaf:
                continue
            wl, wyl, wy2l = cw[i], cwy[i], cwy2[i]
            wr, wyr, wy2r = tw - wl, twy - wyl, twy2 - wy2l
            sse_l = max(wy2l - wyl * wyl / wl, 0.0) if wl > 0.0 else 0.0
            sse_r = max(wy2r - wyr * wyr / wr, 0.0) if wr > 0.0 else 0.0
            total = sse_l + sse_r
            if best is None or total < best[0]:
                best = (total, j, 0.5 * (sx[i] + sx[i + 1]))
    return best


def _fit_numpy(X, y, w, max_depth, min_samples_leaf):
    feature, threshold, left, right, value = [], [], [], [], []

    def build(idx, depth):
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        mean, mse = _node_stats(y[idx], w[idx])
        value.append(mean)
        if depth >= max_depth or idx.size < 2 * min_samples_leaf or mse < PURITY_TOL:
            return node
        found = _best_split_numpy(X[idx], y[idx], w[idx], min_samples_leaf)
        if found is None:
            return node
        _, j, thr = found
        go_left = X[idx, j] <= thr
        feature[node] = j
        threshold[node] = thr
        left[node] = build(idx[go_left], depth + 1)
        right[node] = build(idx[~go_left], depth + 1)
        return node

    build(np.arange(X.shape[0]), 0)
    return (np.asarray(feature, dtype=np.int64), np.asarray(threshold, dtype=float),
            np.asarray(left, dtype=np.int64), np.asarray(right, dtype=np.int64),
            np.asarray(value, dtype=float))


def _predict_numpy(feature, threshold, left, right, value, X):
    n = X.shape[0]
    out = np.empty(n)
    node_of = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        nodes = node_of[active]
        is_leaf = feature[nodes] < 0
        done = active[is_leaf]
        out[done] = value[node_of[done]]
        active = active[~is_leaf]
        if active.size == 0:
            break
        nodes = node_of[active]
        go_left = X[active, feature[nodes]] <= threshold[nodes]
        node_of[active] = np.where(go_left, left[nodes], right[nodes])
    return out


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _fit_numba(X, y, w, max_depth, min_samples_leaf, presorted):  # pragma: no cover - jitted
        # presorted[j] holds all row indices ordered by feature j; each
        # node owns one segment of every row, kept feature-sorted by
        # stable partitioning, so no sorting happens inside the loop
        n, d = X.shape
        max_nodes = 2 * n - 1 if n > 1 else 1
        feature = np.full(max_nodes, -1, dtype=np.int64)
        threshold = np.zeros(max_nodes)
        left = np.full(max_nodes, -1, dtype=np.int64)
        right = np.full(max_nodes, -1, dtype=np.int64)
        value = np.zeros(max_nodes)
        sorted_idx = presorted.copy()
        goes_left = np.zeros(n, dtype=np.bool_)
        scratch = np.empty(n, dtype=np.int64)
        # each stack row: node id, segment start, segment end, depth
        stack = np.zeros((max_nodes + 1, 4), dtype=np.int64)
        stack[0, 0] = 0
        stack[0, 1] = 0
        stack[0, 2] = n
        stack[0, 3] = 0
        top = 1
        n_nodes = 1
        while top > 0:
            top -= 1
            node = stack[top, 0]
            start = stack[top, 1]
            end = stack[top, 2]
            depth = stack[top, 3]
            nn = end - start
            wsum = 0.0
            wy = 0.0
            wy2 = 0.0
            ysum = 0.0
            for s in range(start, end):
                i = sorted_idx[0, s]
                wsum += w[i]
                wy += w[i] * y[i]
                wy2 += w[i] * y[i] * y[i]
                ysum += y[i]
            if wsum > 0.0:
                mean = wy / wsum
                sse = wy2 - wy * wy / wsum
                if sse < 0.0:
                    sse = 0.0
                mse = sse / wsum
            else:
                mean = ysum / nn
                mse = 0.0
            value[node] = mean
            if depth >= max_depth or nn < 2 * min_samples_leaf or mse < PURITY_TOL:
                continue
            best_total = np.inf
            best_j = -1
            best_thr = 0.0
            for j in range(d):
                cl = 0.0
                cly = 0.0
                cly2 = 0.0
                for s in range(nn - 1):
                    i = sorted_idx[j, start + s]
                    cl += w[i]
                    cly += w[i] * y[i]
                    cly2 += w[i] * y[i] * y[i]
                    xl = X[i, j]
                    xr = X[sorted_idx[j, start + s + 1], j]
                    if xl == xr:
                        continue
                    if s + 1 < min_samples_leaf or nn - s - 1 < min_samples_leaf:
                        continue
                    sse_l = 0.0
                    if cl > 0.0:
                        sse_l = cly2 - cly * cly / cl
                        if sse_l < 0.0:
                            sse_l = 0.0
                    wr = wsum - cl
                    sse_r = 0.0
                    if wr > 0.0:
                        wyr = wy - cly
                        sse_r = (wy2 - cly2) - wyr * wyr / wr
                        if sse_r < 0.0:
                            sse_r = 0.0
                    total = sse_l + sse_r
                    if total < best_total:
                        best_total = total
                        best_j = j
                        best_thr = 0.5 * (xl + xr)
            if best_j < 0:
                continue
            nl = 0
            for s in range(start, end):
                i = sorted_idx[best_j, s]
                gl = X[i, best_j] <= best_thr
                goes_left[i] = gl
                if gl:
                    nl += 1
            # stable partition of every feature's segment around the split
            for j in range(d):
                a = 0
                b = nl
                for s in range(start, end):
                    i = sorted_idx[j, s]
                    if goes_left[i]:
                        scratch[a] = i
                        a += 1
                    else:
                        scratch[b] = i
                        b += 1
                for s in range(nn):
                    sorted_idx[j, start + s] = scratch[s]
            feature[node] = best_j
            threshold[node] = best_thr
            left_id = n_nodes
            right_id = n_nodes + 1
            n_nodes += 2
            left[node] = left_id
            right[node] = right_id
            stack[top, 0] = left_id
            stack[top, 1] = start
            stack[top, 2] = start + nl
            stack[top, 3] = depth + 1
            top += 1
            stack[top, 0] = right_id
            stack[top, 1] = start + nl
            stack[top, 2] = end
            stack[top, 3] = depth + 1
            top += 1
        return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
                right[:n_nodes], value[:n_nodes])

    @numba.njit(cache=True)
    def _predict_numba(feature, threshold, left, right, value, X):  # pragma: no cover - jitted
        n = X.shape[0]
        out = np.empty(n)
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[i] = value[node]
        return out

else:  # pragma: no cover - exercised only without numba
    _fit_numba = None
    _predict_numba = None


def _validate_weights(w, n):
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise ValueError("weight vector has length %r, expected %d" % (w.shape, n))
    if np.any(w < 0.0):
        raise ValueError("weights must be nonnegative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1 (got %.12g)" % w.sum())
    return w


def _presort(X):
    """Per-feature row orderings, shape (d, n). Callers fitting many trees
    on one X (boosting rounds) compute this once and pass it through."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="mergesort").T)


def fit_tree(X, y, w, config=None, _presorted=None):
    """Fit a weighted CART regression tree.

    _presorted is an internal fast path: the (d, n) result of _presort(X)
    for exactly this X.
    """
    config = config or TreeConfig()
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("X must be a nonempty 2-D matrix")
    if y.shape != (X.shape[0],):
        raise ValueError("y length does not match X rows")
    w = _validate_weights(w, X.shape[0])
    if _HAVE_NUMBA:
        if _presorted is None:
            _presorted = _presort(X)
        elif _presorted.shape != (X.shape[1], X.shape[0]):
            raise ValueError("presorted index shape does not match X")
        feature, threshold, left, right, value = _fit_numba(
            X, y, w, config.max_depth, config.min_samples_leaf, _presorted)
    else:
        feature, threshold, left, right, value = _fit_numpy(
            X, y, w, config.max_depth, config.min_samples_leaf)
    return RegressionTree(feature=feature, threshold=threshold, left=left,
                          right=right, value=value, n_features=X.shape[1],
                          config=config)


def predict_tree(tree, x):
    """Predict with a fitted tree; accepts one row or an (n, d) batch."""
    x = np.ascontiguousarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != tree.n_features:
        raise ValueError("expected %d features, got shape %r" % (tree.n_features, x.shape))
    kernel = _predict_numba if _HAVE_NUMBA else _predict_numpy
    out = kernel(tree.feature, tree.threshold, tree.left, tree.right, tree.value, x)
    return float(out[0]) if single else out


def dump_tree(tree):
    """Indented one-node-per-line text rendering, for debugging only."""
    lines = []

    def walk(node, depth):
        pad = "  " * depth
        if tree.feature[node] < 0:
            lines.append("%sleaf value=%.6g" % (pad, tree.value[node]))
            return
        lines.append("%sfeature[%d] <= %.6g" % (pad, tree.feature[node], tree.threshold[node]))
        walk(tree.left[node], depth + 1)
        walk(tree.right[node], depth + 1)

    walk(0, 0)
    return "\n".join(lines)
