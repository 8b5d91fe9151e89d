"""Transfer boosting on a pooled sample: S-TrAdaBoost.R2 and the
two-stage TrAdaBoost.R2 baseline.

Both fits step S times over the pool, record one candidate ensemble per
step with its target-fold cross-validation RMSE, and select the step
with the lowest CV error (earliest on ties). They differ in how the
pooled weights evolve between steps: S-TrAdaBoost.R2 reweights every row
from the adjusted errors, while the two-stage baseline only trades total
mass from the source block to the target block on a fixed schedule and
freezes source weights inside each step's boosting run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .boosting import (fit_adaboost_r2, normalized_losses, predict_weighted_median,
                       BoostedEnsemble, MAX_LOG_MEMBER_WEIGHT, _check_loss)
from .dataset import kfold
from .tree import TreeConfig, fit_tree, predict_tree, _presort, _validate_weights

ALPHA_MODES = ("exponent", "multiplier")

# informational beta_bar recorded for a degenerate step whose weighted
# adjusted error reaches 1 exactly; kept finite so summaries stay JSON-safe
BETA_BAR_CLAMP = 1e12

# mixing constant for per-step CV fold seeds: keeps fold draws decoupled
# across steps while staying reproducible from the experiment seed
_CV_SEED_STRIDE = 100003


@dataclass(frozen=True)
class StradaConfig:
    """Hyperparameters shared by both transfer fits."""

    S: int = 30
    N: int = 50
    F: int = 10
    alpha: float = 0.1
    loss: str = "square"
    tree_config: TreeConfig = None
    seed: int = 0
    alpha_mode: str = "exponent"

    def __post_init__(self):
        if int(self.S) < 1 or int(self.N) < 1:
            raise ValueError("S and N must be >= 1")
        if int(self.F) < 2:
            raise ValueError("F must be >= 2")
        if not 0.0 < float(self.alpha) <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        _check_loss(self.loss)
        if self.alpha_mode not in ALPHA_MODES:
            raise ValueError("alpha_mode must be one of %s" % (ALPHA_MODES,))
        if int(self.seed) < 0:
            raise ValueError("seed must be nonnegative")
        if self.tree_config is None:
            object.__setattr__(self, "tree_config", TreeConfig())


@dataclass(frozen=True)
class StepRecord:
    """One candidate step: its ensemble plus the stepping diagnostics."""

    ensemble: BoostedEnsemble
    eta: float
    beta_bar: float
    beta: float
    cv_error: float
    weights_after: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if not (np.isfinite(self.beta_bar) and self.beta_bar >= 0.0):
            raise ValueError("beta_bar must be finite and nonnegative")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")
        if not (np.isfinite(self.cv_error) and self.cv_error >= 0.0):
            raise ValueError("cv_error must be finite and nonnegative")
        w = np.asarray(self.weights_after, dtype=float)
        if w.ndim != 1 or np.any(w < 0.0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights_after must be a simplex vector")
        object.__setattr__(self, "weights_after", w)


@dataclass(frozen=True)
class TransferModel:
    """Fitted transfer model: recorded steps and the selected one."""

    steps: tuple
    best_step: int
    pool: object
    config: StradaConfig

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise ValueError("model needs at least one step")
        if not 0 <= self.best_step < len(steps):
            raise ValueError("best_step out of range")
        object.__setattr__(self, "steps", steps)

    def summary(self):
        """JSON-ready digest: per-step diagnostics, selection, config."""
        return {
            "steps": [{"eta": s.eta, "beta_bar": s.beta_bar, "beta": s.beta,
                       "cv_error": s.cv_error} for s in self.steps],
            "best_step": int(self.best_step),
            "config": asdict(self.config),
        }


def adjusted_error(predictions, y, loss="square"):
    """Per-row error in [0, 1]: residuals scaled by their maximum, then
    passed through the chosen loss law. All-exact predictions give zeros."""
    pred = np.asarray(predictions, dtype=float)
    y = np.asarray(y, dtype=float)
    if pred.shape != y.shape or pred.ndim != 1:
        raise ValueError("predictions and y must be equal-length vectors")
    return normalized_losses(np.abs(y - pred), loss)


def beta_schedule(t, S, p, q):
    """Target-mass schedule: q/(p+q) at t=0 rising linearly to 1 at t=S-1."""
    if not 0 <= t <= S - 1:
        raise ValueError("t must lie in [0, S-1], got t=%r, S=%r" % (t, S))
    if S == 1 or t == S - 1:
        return 1.0
    start = q / (p + q)
    return start + (t / (S - 1)) * (1.0 - start)


def update_weights(w, e, beta_bar, beta, alpha, p, q, alpha_mode="exponent"):
    """One S-TrAdaBoost.R2 reweighting pass.

    Source rows (first p) shrink with their error via beta_bar; target
    rows grow with their accuracy via beta. The default applies the
    learning rate as an exponent scale; "multiplier" applies it as a
    plain factor on every weight, which cancels in the normalizer.
    """
    w = np.asarray(w, dtype=float)
    e = np.asarray(e, dtype=float)
    if w.shape != (p + q,) or e.shape != (p + q,):
        raise ValueError("w and e must have length p+q")
    if beta_bar < 0.0:
        raise ValueError("beta_bar must be nonnegative")
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if alpha_mode not in ALPHA_MODES:
        raise ValueError("alpha_mode must be one of %s" % (ALPHA_MODES,))
    u = np.empty_like(w)
    if alpha_mode == "exponent":
        u[:p] = w[:p] * beta_bar ** (alpha * e[:p])
        u[p:] = w[p:] * beta ** (alpha * (1.0 - e[p:]))
    else:
        u[:p] = alpha * w[:p] * beta_bar ** e[:p]
        u[p:] = alpha * w[p:] * beta ** (1.0 - e[p:])
    Z = u.sum()
    if not Z > 0.0:
        raise ValueError("weight normalizer vanished (Z=%r)" % Z)
    return u / Z


def _check_fit_inputs(pool, config):
    if pool.n_rows == 0:
        raise ValueError("empty pool")
    if pool.q < config.F:
        raise ValueError("target pool size q=%d must be >= F=%d" % (pool.q, config.F))


def cv_step_error(pool, weights, config, t, fit_fn=None):
    """Mean target-fold RMSE for one step's model family.

    Only the q target rows are folded; every fold fit sees all source
    rows plus the target training folds, with the current weights
    restricted to those rows and renormalized.
    """
    _check_fit_inputs(pool, config)
    weights = np.asarray(weights, dtype=float)
    if fit_fn is None:
        def fit_fn(X, y, w):
            return fit_adaboost_r2(X, y, w, config.N, config.loss,
                                   config.tree_config, config.seed)
    folds = kfold(pool.q, config.F, seed=config.seed * _CV_SEED_STRIDE + t)
    src_rows = np.arange(pool.p)
    fold_errors = []
    for f in range(config.F):
        train_rows = np.concatenate([src_rows, pool.p + folds.train_indices(f)])
        test_rows = pool.p + folds.test_indices(f)
        w = weights[train_rows]
        total = w.sum()
        if total <= 0.0:
            w = np.full(w.size, 1.0 / w.size)
        else:
            w = w / total
        model = fit_fn(pool.X[train_rows], pool.y[train_rows], w)
        pred = predict_weighted_median(model, pool.X[test_rows])
        resid = pred - pool.y[test_rows]
        fold_errors.append(math.sqrt(float(np.mean(resid * resid))))
    return float(np.mean(fold_errors))


def _informational_beta_bar(eta):
    # eta == 1 would divide by zero; the record is diagnostic only there
    if eta >= 1.0:
        return BETA_BAR_CLAMP
    return eta / (1.0 - eta)


def fit_strada(pool, config=None):
    """Fit S-TrAdaBoost.R2 on a training pool.

    Each step fits a full AdaBoost.R2 ensemble under the current pooled
    weights, scores it by target-fold CV, then reweights the pool. A step
    whose weighted adjusted error reaches 0.5 is recorded and stepping
    stops there.
    """
    config = config or StradaConfig()
    _check_fit_inputs(pool, config)
    p, q = pool.p, pool.q
    w = np.full(p + q, 1.0 / (p + q))
    steps = []
    for t in range(config.S):
        ensemble = fit_adaboost_r2(pool.X, pool.y, w, config.N, config.loss,
                                   config.tree_config, config.seed)
        e = adjusted_error(predict_weighted_median(ensemble, pool.X), pool.y, config.loss)
        eta = float(w @ e)
        beta = beta_schedule(t, config.S, p, q)
        cv = cv_step_error(pool, w, config, t)
        if eta >= 0.5:
            steps.append(StepRecord(ensemble=ensemble, eta=eta,
                                    beta_bar=_informational_beta_bar(eta), beta=beta,
                                    cv_error=cv, weights_after=w.copy()))
            break
        beta_bar = eta / (1.0 - eta)
        w = update_weights(w, e, beta_bar, beta, config.alpha, p, q, config.alpha_mode)
        steps.append(StepRecord(ensemble=ensemble, eta=eta, beta_bar=beta_bar,
                                beta=beta, cv_error=cv, weights_after=w.copy()))
    best = _best_step_index(steps)
    return TransferModel(steps=tuple(steps), best_step=best, pool=pool, config=config)


def _best_step_index(steps):
    errors = np.asarray([s.cv_error for s in steps])
    return int(np.argmin(errors))  # argmin takes the earliest tie


def _fit_frozen_adaboost_r2(X, y, w_init, p, N, loss, tree_config):
    """AdaBoost.R2 whose first p (source) weights never move.

    Target weights follow the usual beta^(1-loss) update but are rescaled
    to keep their block mass constant, so the source block stays bitwise
    identical across rounds. Returns (ensemble, weight history including
    the initial vector).
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    w = _validate_weights(w_init, X.shape[0]).copy()
    presorted = _presort(X)
    history = [w.copy()]
    members = []
    log_weights = []
    for _ in range(int(N)):
        tree = fit_tree(X, y, w, tree_config, _presorted=presorted)
        losses = normalized_losses(np.abs(y - predict_tree(tree, X)), loss)
        avg_loss = float(w @ losses)
        if avg_loss >= 0.5:
            if not members:
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
        target_mass = w[p:].sum()
        if target_mass > 0.0:
            u = w[p:] * beta ** (1.0 - losses[p:])
            w[p:] = u * (target_mass / u.sum())
        history.append(w.copy())
    ensemble = BoostedEnsemble(members=tuple(members),
                               member_log_weights=np.asarray(log_weights),
                               loss_kind=loss)
    return ensemble, history


def _set_target_mass(w, p, target_mass):
    """Stage-1 rebalance: bisect a common decay factor f in [0, 1] for the
    source block so the target block holds exactly target_mass."""
    w = np.asarray(w, dtype=float)
    src_mass = w[:p].sum()
    tgt_mass = w[p:].sum()
    if p == 0 or src_mass <= 0.0:
        return w / w.sum()
    if target_mass >= 1.0:
        f = 0.0
    else:
        def excess(f):
            # target share after decaying the source block by f
            return tgt_mass / (f * src_mass + tgt_mass) - target_mass
        lo, hi = 0.0, 1.0
        if excess(hi) >= 0.0:
            f = 1.0  # already at or above the schedule; never inflate source
        else:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if excess(mid) >= 0.0:
                    lo = mid
                else:
                    hi = mid
            f = 0.5 * (lo + hi)
    u = w.copy()
    u[:p] *= f
    return u / u.sum()


def fit_ttr2(pool, config=None):
    """Fit the two-stage TrAdaBoost.R2 baseline on an unsampled pool.

    Stage 1 at each step moves total weight from the source block to the
    target block until the target share matches the step schedule; stage
    2 fits AdaBoost.R2 with source weights frozen. The step diagnostics
    (eta, beta_bar) are recorded from the pool adjusted errors for
    comparability but drive no update here.
    """
    config = config or StradaConfig()
    _check_fit_inputs(pool, config)
    p, q = pool.p, pool.q

    def frozen_fit(X, y, w):
        return _fit_frozen_adaboost_r2(X, y, w, p, config.N, config.loss,
                                       config.tree_config)[0]

    w = np.full(p + q, 1.0 / (p + q))
    steps = []
    for t in range(config.S):
        beta = beta_schedule(t, config.S, p, q)
        w = _set_target_mass(w, p, beta)
        ensemble = frozen_fit(pool.X, pool.y, w)
        e = adjusted_error(predict_weighted_median(ensemble, pool.X), pool.y, config.loss)
        eta = float(w @ e)
        cv = cv_step_error(pool, w, config, t, fit_fn=frozen_fit)
        steps.append(StepRecord(ensemble=ensemble, eta=eta,
                                beta_bar=_informational_beta_bar(eta), beta=beta,
                                cv_error=cv, weights_after=w.copy()))
    best = _best_step_index(steps)
    return TransferModel(steps=tuple(steps), best_step=best, pool=pool, config=config)


def predict(model, x):
    """Weighted-median prediction of the selected step's ensemble."""
    return predict_weighted_median(model.steps[model.best_step].ensemble, x)
