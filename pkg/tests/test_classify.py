import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import accuracy_oracle, auc_oracle
from sqikit.classify import (
    ForestConfig,
    cross_validate,
    forest_fit,
    forest_from_text,
    forest_predict_proba,
    forest_to_text,
    group_kfold,
    holdout_validate,
    tree_predict_proba,
)
from sqikit.metrics import accuracy, roc_auc


def separable(n=200, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, (n, 2))
    y = (x[:, 0] + 0.5 * x[:, 1] > 0).astype(int)
    return x, y


# grouped folds


def test_group_kfold_examples():
    plan = group_kfold(np.repeat(np.arange(10), 3), 5, seed=1)
    assert all(len(test) == 2 for _, test in plan.folds)
    loo = group_kfold(np.arange(5), 5)
    assert sorted(int(t[0]) for _, t in loo.folds) == list(range(5))
    assert all(len(t) == 1 for _, t in loo.folds)
    with pytest.raises(ValueError):
        group_kfold(np.arange(3), 5)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=5, max_size=200), st.integers(2, 5), st.integers(0, 1000))
def test_group_kfold_partition(groups, k, seed):
    if len(set(groups)) < k:
        return
    plan = group_kfold(groups, k, seed)
    tests = np.concatenate([t for _, t in plan.folds])
    assert sorted(tests.tolist()) == sorted(set(groups))
    for train, test in plan.folds:
        assert np.intersect1d(train, test).size == 0
        assert sorted(np.r_[train, test].tolist()) == sorted(set(groups))


# forest


def test_separable_training_accuracy():
    x, y = separable()
    model = forest_fit(x, y, ForestConfig(n_trees=50))
    p = forest_predict_proba(model, x)
    assert accuracy(y, (p >= 0.5).astype(int)) == 1.0


def test_permuted_labels_auc_near_chance():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((300, 4))
    y = rng.permutation(np.r_[np.zeros(150), np.ones(150)]).astype(int)
    groups = np.repeat(np.arange(60), 5)
    res = cross_validate(x, y, groups, ForestConfig(n_trees=50))
    assert res["auc_mean"] == pytest.approx(0.5, abs=0.1)


def test_constant_features_predict_prior():
    y = np.array([0] * 6 + [1] * 4)
    model = forest_fit(np.ones((10, 3)), y, ForestConfig(n_trees=10, bootstrap=False))
    assert np.allclose(forest_predict_proba(model, np.ones((4, 3))), 0.4, atol=1e-12)


def test_memorized_point():
    x, y = separable(100, seed=4)
    model = forest_fit(x, y, ForestConfig(n_trees=30))
    i = int(np.argmax(np.abs(x[:, 0] + 0.5 * x[:, 1])))
    p = forest_predict_proba(model, x[i : i + 1])[0]
    assert (p if y[i] else 1 - p) >= 0.95


def test_two_tree_average():
    x, y = separable(80, seed=5)
    model = forest_fit(x, y, ForestConfig(n_trees=2))
    single = [tree_predict_proba(t, x) for t in model.trees]
    assert np.allclose(forest_predict_proba(model, x), (single[0] + single[1]) / 2, atol=1e-12, rtol=0)


def test_forest_validation():
    x, y = separable(40)
    with pytest.raises(ValueError):
        forest_fit(x, np.zeros(40, dtype=int))
    with pytest.raises(ValueError):
        forest_fit(x, y, ForestConfig(n_trees=0))
    model = forest_fit(x, y, ForestConfig(n_trees=3))
    with pytest.raises(ValueError):
        forest_predict_proba(model, np.zeros((2, 3)))


def test_tree_invariants():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((150, 6))
    y = (x[:, 0] * x[:, 1] > 0).astype(int)
    model = forest_fit(x, y, ForestConfig(n_trees=20))
    for t in model.trees:
        assert np.allclose(t.proba.sum(axis=1), 1.0)
        internal = t.feature >= 0
        assert np.all(t.feature[internal] < 6)
        assert np.all(t.gain[internal] >= 0)


def test_train_auc_not_below_heldout():
    x, y = separable(200, seed=7)
    xt, yt = separable(200, seed=8)
    model = forest_fit(x, y, ForestConfig(n_trees=50))
    assert roc_auc(y, forest_predict_proba(model, x)) >= roc_auc(yt, forest_predict_proba(model, xt))


def test_parallel_order_independence():
    # tree t depends only on seed + t, so a forest is a prefix of a larger one
    x, y = separable(100, seed=9)
    small = forest_fit(x, y, ForestConfig(n_trees=3, seed=4))
    large = forest_fit(x, y, ForestConfig(n_trees=6, seed=4))
    for a, b in zip(small.trees, large.trees):
        assert np.array_equal(a.threshold, b.threshold) and np.array_equal(a.proba, b.proba)


def test_forest_round_trip():
    x, y = separable(60)
    model = forest_fit(x, y, ForestConfig(n_trees=5))
    again = forest_from_text(forest_to_text(model))
    assert np.array_equal(forest_predict_proba(again, x), forest_predict_proba(model, x))


# cross-validation


def test_cross_validate_separable_and_deterministic():
    x, y = separable(200, seed=10)
    groups = np.arange(200) // 4
    cfg = ForestConfig(n_trees=40)
    a = cross_validate(x, y, groups, cfg)
    b = cross_validate(x, y, groups, cfg)
    assert a["per_fold"] == b["per_fold"]
    assert len(a["per_fold"]) == 5
    assert a["auc_mean"] > 0.95
    assert a["auc_std"] == pytest.approx(np.std([f["auc"] for f in a["per_fold"]]))


def test_holdout_validate():
    x, y = separable(200, seed=11)
    groups = np.arange(200) // 4
    res = holdout_validate(x, y, groups, ForestConfig(n_trees=30))
    assert res["n_train"] + res["n_test"] == 200
    assert res["test_groups"].size == 25
    assert res["auc"] > 0.95


# metrics against direct oracles


@pytest.mark.parametrize("seed", range(10))
def test_metrics_match_oracles(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(10, 200))
    truth = rng.integers(0, 2, n)
    truth[:2] = [0, 1]
    scores = np.round(rng.standard_normal(n), 1)  # plenty of ties
    assert roc_auc(truth, scores) == pytest.approx(auc_oracle(truth.tolist(), scores.tolist()), abs=1e-12)
    pred = (scores >= 0.5).astype(int)
    assert accuracy(truth, pred) == pytest.approx(accuracy_oracle(truth.tolist(), pred.tolist()), abs=1e-12)


def test_auc_monotone_invariance():
    rng = np.random.default_rng(1)
    truth = rng.integers(0, 2, 100)
    s = rng.standard_normal(100)
    assert roc_auc(truth, np.exp(s)) == roc_auc(truth, s)


def test_auc_errors():
    with pytest.raises(ValueError):
        roc_auc([1, 1, 1], [0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        roc_auc([0, 1], [0.1, np.nan])
