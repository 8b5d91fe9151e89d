"""AdaBoost.R2 regression boosting with weighted-median prediction.

Deterministic variant: the weak learner is fit with instance weights
directly (no weight-proportional resampling), so the seed argument is
accepted only for interface uniformity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tree import TreeConfig, fit_tree, predict_tree, _presort, _validate_weights

LOSS_KINDS = ("linear", "square", "exponential")

# log member weight assigned to a perfect (beta = 0) member; large enough
# to dominate the vote without introducing infinities
MAX_LOG_MEMBER_WEIGHT = math.log(1e12)


def _check_loss(loss):
    if loss not in LOSS_KINDS:
        raise ValueError("loss must be one of %s, got %r" % (", ".join(LOSS_KINDS), loss))
    return loss


@dataclass(frozen=True)
class BoostedEnsemble:
    """Fitted boosting ensemble: trees plus log(1/beta) vote weights."""

    members: tuple
    member_log_weights: np.ndarray
    loss_kind: str = "square"

    def __post_init__(self):
        logw = np.asarray(self.member_log_weights, dtype=float)
        members = tuple(self.members)
        if len(members) == 0:
            raise ValueError("ensemble needs at least one member")
        if logw.shape != (len(members),):
            raise ValueError("member_log_weights length does not match members")
        if not np.all(np.isfinite(logw)) or np.any(logw < 0.0):
            raise ValueError("member log weights must be finite and nonnegative")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "member_log_weights", logw)
        _check_loss(self.loss_kind)

    def __len__(self):
        return len(self.members)


def normalized_losses(residuals, loss="square"):
    """Map nonnegative residuals into [0, 1] by Drucker's loss laws.

    With D the maximum residual: linear is r/D, square (r/D)^2,
    exponential 1 - exp(-r/D). D = 0 returns all zeros.
    """
    _check_loss(loss)
    r = np.asarray(residuals, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("residuals must be a nonempty vector")
    if np.any(r < 0.0) or not np.all(np.isfinite(r)):
        raise ValueError("residuals must be finite and nonnegative")
    d = r.max()
    if d == 0.0:
        return np.zeros_like(r)
    z = r / d
    if loss == "linear":
        return z
    if loss == "square":
        return z * z
    return 1.0 - np.exp(-z)


def fit_adaboost_r2(X, y, w_init, N, loss="square", tree_config=None, seed=None):
    """Drucker AdaBoost.R2 with a weighted regression tree learner.

    Runs up to N rounds. A round with average loss >= 0.5 stops boosting
    before admitting its member, except that a sole first member is kept
    so the ensemble is never empty. A perfect round (average loss 0)
    admits its member and stops.
    """
    del seed  # deterministic weighted fitting, kept for interface uniformity
    if int(N) < 1:
        raise ValueError("N must be >= 1")
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    tree_config = tree_config or TreeConfig()
    w = _validate_weights(w_init, X.shape[0]).copy()
    presorted = _presort(X)  # rounds refit on the same X; sort it once
    members = []
    log_weights = []
    for _ in range(int(N)):
        tree = fit_tree(X, y, w, tree_config, _presorted=presorted)
        losses = normalized_losses(np.abs(y - predict_tree(tree, X)), loss)
        avg_loss = float(w @ losses)
        if avg_loss >= 0.5:
            if not members:
                # beta >= 1 here, so clamp the lone vote weight at zero
                beta = avg_loss / max(1.0 - avg_loss, 1e-300)
                members.append(tree)
                log_weights.append(max(math.log(1.0 / beta), 0.0))
            break
        members.append(tree)
        if avg_loss == 0.0:
            log_weights.append(MAX_LOG_MEMBER_WEIGHT)
            break
        beta = avg_loss / (1.0 - avg_loss)
        log_weights.append(min(math.log(1.0 / beta), MAX_LOG_MEMBER_WEIGHT))
        w = w * beta ** (1.0 - losses)
        w = w / w.sum()
    return BoostedEnsemble(members=tuple(members),
                           member_log_weights=np.asarray(log_weights),
                           loss_kind=loss)


def predict_weighted_median(ensemble, x):
    """Weighted-median vote over member predictions.

    Returns the smallest member prediction whose cumulative log weight
    (in prediction-sorted order) reaches half the total. Accepts a
    single row or an (n, d) batch.
    """
    x = np.ascontiguousarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x.reshape(1, -1)
    preds = np.column_stack([predict_tree(m, x) for m in ensemble.members])
    order = np.argsort(preds, axis=1)
    sorted_preds = np.take_along_axis(preds, order, axis=1)
    sorted_w = ensemble.member_log_weights[order]
    csum = np.cumsum(sorted_w, axis=1)
    half = 0.5 * csum[:, -1:]
    pick = np.argmax(csum >= half, axis=1)
    out = sorted_preds[np.arange(x.shape[0]), pick]
    return float(out[0]) if single else out
