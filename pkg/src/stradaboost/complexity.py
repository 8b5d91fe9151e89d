"""Dataset-difficulty measures for regression tasks.

Three scalar summaries: a correlation-based hardness score (what share
of instances no single well-correlated feature can explain), a global
linearity score from a full least-squares fit, and a smoothness score
from the feature-space path length when rows are ordered by target.
Targets are min-max normalized inside the first two measures so the
residual threshold has a fixed scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import pearson_correlation, standardize


@dataclass(frozen=True)
class ComplexityReport:
    """The three measures plus the settings they were computed under."""

    c_fe: float
    d_l: float
    d_i: float
    epsilon: float
    standardized_d_i: bool = True

    def __post_init__(self):
        if not 0.0 <= self.c_fe <= 1.0:
            raise ValueError("c_fe must lie in [0, 1]")
        if self.d_i < 0.0:
            raise ValueError("d_i must be nonnegative")

    def to_dict(self):
        return {"c_fe": self.c_fe, "d_l": self.d_l, "d_i": self.d_i,
                "epsilon": self.epsilon, "standardized_d_i": self.standardized_d_i}


def _lstsq(A, y):
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def ols_fit(X, y):
    """Least-squares linear fit; returns [intercept, slopes...].

    Rank-deficient systems resolve to the minimum-norm solution.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be (N, d) with matching y")
    n, d = X.shape
    if n < d + 1:
        raise ValueError("need at least d+1 = %d rows, got %d" % (d + 1, n))
    return _lstsq(np.column_stack([np.ones(n), X]), y)


def _minmax(y):
    lo, hi = float(y.min()), float(y.max())
    if hi == lo:
        return np.zeros_like(y)
    return (y - lo) / (hi - lo)


def c_fe(ds, epsilon=0.1):
    """Feature-efficiency hardness: the fraction of instances that
    single-feature linear fits cannot drive below the residual threshold.

    Repeatedly picks the unvisited feature most correlated (absolute
    Pearson) with the target over the surviving instances, fits one
    line, and discards instances fit within epsilon. Returns
    1 - (total discarded)/N, so 0 means one feature explains everything
    and 1 means no instance was ever explained.
    """
    if ds.n < 3:
        raise ValueError("need at least 3 rows, got %d" % ds.n)
    spreads = ds.features.max(axis=0) - ds.features.min(axis=0)
    if np.all(spreads == 0.0):
        raise ValueError("degenerate dataset: every feature is constant")
    y = _minmax(ds.targets)
    remaining = np.arange(ds.n)
    unvisited = list(range(ds.d))
    removed = 0
    while unvisited and remaining.size:
        yr = y[remaining]
        best_j, best_score = unvisited[0], -1.0
        for j in unvisited:
            col = ds.features[remaining, j]
            if remaining.size < 2 or np.all(col == col[0]) or np.all(yr == yr[0]):
                score = 0.0
            else:
                score = abs(pearson_correlation(col, yr))
            if score > best_score:
                best_j, best_score = j, score
        unvisited.remove(best_j)
        col = ds.features[remaining, best_j]
        coef = _lstsq(np.column_stack([np.ones(remaining.size), col]), yr)
        resid = yr - (coef[0] + coef[1] * col)
        keep = np.abs(resid) > epsilon
        removed += int(np.count_nonzero(~keep))
        remaining = remaining[keep]
    return 1.0 - removed / ds.n


def d_l(ds):
    """Global linearity: 1 minus the mean absolute residual of a full
    linear fit on the min-max normalized target."""
    y = _minmax(ds.targets)
    coef = ols_fit(ds.features, y)
    pred = coef[0] + ds.features @ coef[1:]
    return float(1.0 - np.abs(y - pred).mean())


def d_i(ds, standardize_features=True):
    """Smoothness: average feature-space step length along the rows
    sorted by target value (stable sort, so target ties keep row order).

    Features are z-scored by default so mixed units cannot dominate the
    step lengths; pass standardize_features=False for raw coordinates.
    """
    if ds.n == 1:
        return 0.0
    X = standardize(ds)[0].features if standardize_features else ds.features
    order = np.argsort(ds.targets, kind="stable")
    steps = np.diff(X[order], axis=0)
    return float(np.sqrt((steps * steps).sum(axis=1)).sum() / ds.n)


def complexity_report(ds, epsilon=0.1, standardize_d_i=True):
    """All three measures on one dataset with the settings echoed back."""
    return ComplexityReport(c_fe=c_fe(ds, epsilon),
                            d_l=d_l(ds),
                            d_i=d_i(ds, standardize_features=standardize_d_i),
                            epsilon=epsilon,
                            standardized_d_i=standardize_d_i)
