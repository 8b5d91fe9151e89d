import math

import numpy as np
import pytest

from stradaboost import (
    BoostedEnsemble,
    TreeConfig,
    fit_adaboost_r2,
    fit_tree,
    normalized_losses,
    predict_tree,
    predict_weighted_median,
)
from stradaboost.boosting import MAX_LOG_MEMBER_WEIGHT

from oracles import best_stump, ref_weighted_median


def uniform(n):
    return np.full(n, 1.0 / n)


def stump_predictions(X, y, w, j, thr):
    """Reference stump output: weighted mean on each side of the cut."""
    mask = X[:, j] <= thr
    out = np.empty(len(y))
    for m in (mask, ~mask):
        out[m] = float((w[m] * y[m]).sum() / w[m].sum())
    return out


def ref_adaboost_trace(X, y, w, N, loss):
    """Independent re-derivation of the boosting loop on stump learners.

    Returns a list of (member prediction vector, log vote weight) pairs
    following the same admit/stop rules the library documents.
    """
    w = w.copy()
    trace = []
    for _ in range(N):
        j, thr, _ = best_stump(X, y, w)
        preds = stump_predictions(X, y, w, j, thr)
        r = np.abs(y - preds)
        d = r.max()
        if d == 0.0:
            losses = np.zeros_like(r)
        else:
            z = r / d
            losses = {"linear": z, "square": z * z,
                      "exponential": 1.0 - np.exp(-z)}[loss]
        avg = float(w @ losses)
        if avg >= 0.5:
            if not trace:
                trace.append((preds, max(math.log(max(1.0 - avg, 1e-300) / avg), 0.0)))
            break
        if avg == 0.0:
            trace.append((preds, MAX_LOG_MEMBER_WEIGHT))
            break
        beta = avg / (1.0 - avg)
        trace.append((preds, min(math.log(1.0 / beta), MAX_LOG_MEMBER_WEIGHT)))
        w = w * beta ** (1.0 - losses)
        w = w / w.sum()
    return trace


def test_normalized_losses_oracles():
    r = np.array([2.0, 4.0])
    assert np.allclose(normalized_losses(r, "linear"), [0.5, 1.0])
    assert np.allclose(normalized_losses(r, "square"), [0.25, 1.0])
    assert np.allclose(normalized_losses(r, "exponential"),
                       [1.0 - math.exp(-0.5), 1.0 - math.exp(-1.0)])
    assert np.all(normalized_losses(np.zeros(3)) == 0.0)
    losses = normalized_losses(np.array([0.0, 1.0, 3.0]), "exponential")
    assert losses.min() == 0.0 and losses.max() <= 1.0


def test_normalized_losses_validation():
    with pytest.raises(ValueError, match="loss must be one of"):
        normalized_losses(np.array([1.0]), "cubic")
    with pytest.raises(ValueError, match="nonnegative"):
        normalized_losses(np.array([1.0, -0.5]))
    with pytest.raises(ValueError, match="nonempty"):
        normalized_losses(np.array([]))
    with pytest.raises(ValueError):
        normalized_losses(np.array([np.inf]))


def test_single_round_equals_plain_tree():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(30, 2))
    y = rng.normal(size=30)
    cfg = TreeConfig(max_depth=3)
    ens = fit_adaboost_r2(X, y, uniform(30), N=1, tree_config=cfg)
    tree = fit_tree(X, y, uniform(30), cfg)
    assert len(ens) == 1
    assert np.array_equal(predict_weighted_median(ens, X), predict_tree(tree, X))


def test_first_round_trace_by_hand():
    # stump splits at 2.5 -> leaves 0 and 4/3; linear losses
    # [0, 0, 0, .5, .5, 1]; avg 1/3; beta 1/2; vote weight log 2
    X = np.arange(6.0).reshape(-1, 1)
    y = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 2.0])
    ens = fit_adaboost_r2(X, y, uniform(6), N=1, loss="linear",
                          tree_config=TreeConfig(max_depth=1))
    assert ens.member_log_weights[0] == pytest.approx(math.log(2.0), abs=1e-12)
    preds = predict_weighted_median(ens, X)
    assert np.allclose(preds, [0, 0, 0, 4 / 3, 4 / 3, 4 / 3], atol=1e-12)


def test_multi_round_trace_matches_reference():
    X = np.arange(6.0).reshape(-1, 1)
    y = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 2.0])
    for loss in ("linear", "square", "exponential"):
        ens = fit_adaboost_r2(X, y, uniform(6), N=4, loss=loss,
                              tree_config=TreeConfig(max_depth=1))
        trace = ref_adaboost_trace(X, y, uniform(6), 4, loss)
        assert len(ens) == len(trace)
        for member, logw, (ref_preds, ref_logw) in zip(
                ens.members, ens.member_log_weights, trace):
            assert logw == pytest.approx(ref_logw, abs=1e-9)
            assert np.allclose(predict_tree(member, X), ref_preds, atol=1e-9)


def test_randomized_traces_match_reference():
    rng = np.random.default_rng(31)
    for trial in range(8):
        n = int(rng.integers(8, 40))
        d = int(rng.integers(1, 3))
        X = rng.normal(size=(n, d))
        y = rng.normal(size=n)
        w = rng.dirichlet(np.ones(n))
        loss = ("linear", "square", "exponential")[trial % 3]
        ens = fit_adaboost_r2(X, y, w, N=5, loss=loss,
                              tree_config=TreeConfig(max_depth=1))
        trace = ref_adaboost_trace(X, y, w, 5, loss)
        assert len(ens) == len(trace)
        for member, logw, (ref_preds, ref_logw) in zip(
                ens.members, ens.member_log_weights, trace):
            assert logw == pytest.approx(ref_logw, abs=1e-9)
            assert np.allclose(predict_tree(member, X), ref_preds, atol=1e-9)


def test_high_loss_first_round_keeps_sole_member():
    # best stump cuts at 0.5; linear losses [0, .5, 1, .5] average exactly
    # 0.5, so boosting stops but keeps the lone member with zero vote weight
    X = np.arange(4.0).reshape(-1, 1)
    y = np.array([0.0, 1.0, 0.0, 1.0])
    ens = fit_adaboost_r2(X, y, uniform(4), N=10, loss="linear",
                          tree_config=TreeConfig(max_depth=1))
    assert len(ens) == 1
    assert ens.member_log_weights[0] == 0.0


def test_perfect_round_gets_max_weight_and_stops():
    X = np.arange(4.0).reshape(-1, 1)
    y = np.array([0.0, 0.0, 0.0, 10.0])
    ens = fit_adaboost_r2(X, y, uniform(4), N=10, loss="linear",
                          tree_config=TreeConfig(max_depth=1))
    assert len(ens) == 1
    assert ens.member_log_weights[0] == MAX_LOG_MEMBER_WEIGHT
    assert np.allclose(predict_weighted_median(ens, X), y, atol=1e-12)


def test_fit_validation():
    X = np.arange(4.0).reshape(-1, 1)
    y = np.arange(4.0)
    with pytest.raises(ValueError, match="N must be"):
        fit_adaboost_r2(X, y, uniform(4), N=0)
    with pytest.raises(ValueError, match="sum to 1"):
        fit_adaboost_r2(X, y, np.ones(4), N=2)
    with pytest.raises(ValueError, match="loss"):
        fit_adaboost_r2(X, y, uniform(4), N=2, loss="nope")


def test_ensemble_validation():
    X = np.arange(4.0).reshape(-1, 1)
    tree = fit_tree(X, np.arange(4.0), uniform(4))
    with pytest.raises(ValueError, match="at least one member"):
        BoostedEnsemble(members=(), member_log_weights=np.array([]))
    with pytest.raises(ValueError, match="length"):
        BoostedEnsemble(members=(tree,), member_log_weights=np.array([1.0, 2.0]))
    with pytest.raises(ValueError, match="nonnegative"):
        BoostedEnsemble(members=(tree,), member_log_weights=np.array([-1.0]))
    with pytest.raises(ValueError, match="finite"):
        BoostedEnsemble(members=(tree,), member_log_weights=np.array([np.inf]))


def test_weighted_median_hand_cases():
    X = np.zeros((1, 1))
    low = fit_tree(X, np.array([5.0]), np.array([1.0]), TreeConfig(max_depth=0))
    high = fit_tree(X, np.array([10.0]), np.array([1.0]), TreeConfig(max_depth=0))
    q = np.array([0.0])
    ens = BoostedEnsemble((low, high), np.array([1.0, 3.0]))
    assert predict_weighted_median(ens, q) == 10.0
    ens = BoostedEnsemble((low, high), np.array([3.0, 1.0]))
    assert predict_weighted_median(ens, q) == 5.0
    # equal weights: cumulative reaches half at the lower prediction
    ens = BoostedEnsemble((low, high), np.array([1.0, 1.0]))
    assert predict_weighted_median(ens, q) == 5.0
    batch = predict_weighted_median(ens, np.zeros((3, 1)))
    assert batch.shape == (3,)
    assert np.all(batch == 5.0)


def test_weighted_median_matches_reference_on_random_ensembles():
    rng = np.random.default_rng(13)
    for trial in range(6):
        n, d, k = 25, 2, int(rng.integers(2, 7))
        X = rng.normal(size=(n, d))
        members = tuple(
            fit_tree(X, rng.normal(size=n), uniform(n), TreeConfig(max_depth=2))
            for _ in range(k))
        logw = rng.uniform(0.1, 3.0, size=k)
        ens = BoostedEnsemble(members, logw)
        Q = rng.normal(size=(10, d))
        got = predict_weighted_median(ens, Q)
        per_member = np.column_stack([predict_tree(m, Q) for m in members])
        for i in range(10):
            assert got[i] == pytest.approx(
                ref_weighted_median(per_member[i], logw), abs=1e-12)


def test_boosting_improves_training_fit():
    rng = np.random.default_rng(17)
    X = rng.uniform(-2, 2, size=(80, 1))
    y = np.sin(2.0 * X[:, 0]) + 0.05 * rng.normal(size=80)
    cfg = TreeConfig(max_depth=2)
    one = fit_adaboost_r2(X, y, uniform(80), N=1, tree_config=cfg)
    many = fit_adaboost_r2(X, y, uniform(80), N=25, tree_config=cfg)
    err_one = np.sqrt(np.mean((predict_weighted_median(one, X) - y) ** 2))
    err_many = np.sqrt(np.mean((predict_weighted_median(many, X) - y) ** 2))
    assert len(many) > 1
    assert err_many < err_one
