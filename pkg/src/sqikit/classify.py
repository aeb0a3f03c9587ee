"""Random forest on SQI features with subject-grouped cross-validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metrics import accuracy, roc_auc
from .outlier import standardize
from .serialize import decode_array, dumps, encode_array, loads


@dataclass
class ForestConfig:
    n_trees: int = 200
    min_samples_leaf: int = 2
    max_features: str = "sqrt"  # or "all"
    bootstrap: bool = True
    seed: int = 0


@dataclass
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    proba: np.ndarray  # (n_nodes, 2) class probabilities
    gain: np.ndarray  # impurity decrease at each split, 0 at leaves


@dataclass
class ForestModel:
    trees: list
    n_trees: int
    max_features: str
    seed: int
    feature_names: list = field(default_factory=list)
    n_features: int = 0


@dataclass(frozen=True)
class GroupFoldPlan:
    folds: tuple  # ((train_groups, test_groups), ...)
    n_folds: int
    seed: int


def _gini(counts):
    total = counts.sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / total[..., None]
    return 1.0 - np.nansum(p * p, axis=-1)


def _best_split(x, y, features, min_leaf):
    """Best Gini split over ``features``; returns (gain, feature, threshold) or None."""
    n = y.size
    parent = _gini(np.bincount(y, minlength=2).astype(float))
    best = None
    for f in features:
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ys = y[order]
        pos_left = np.cumsum(ys)[:-1].astype(float)
        n_left = np.arange(1, n, dtype=float)
        n_right = n - n_left
        pos_right = ys.sum() - pos_left
        valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        left = np.stack([n_left - pos_left, pos_left], axis=1)
        right = np.stack([n_right - pos_right, pos_right], axis=1)
        child = (n_left * _gini(left) + n_right * _gini(right)) / n
        gain = parent - child
        gain[~valid] = -np.inf
        k = int(np.argmax(gain))
        if best is None or gain[k] > best[0]:
            best = (float(gain[k]), int(f), 0.5 * (xs[k] + xs[k + 1]))
    return best


def _grow_tree(x, y, n_candidates, min_leaf, rng) -> Tree:
    feature, threshold, left, right, proba, gains = [], [], [], [], [], []
    d = x.shape[1]

    def new_node(rows):
        counts = np.bincount(y[rows], minlength=2).astype(float)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        proba.append(counts / counts.sum())
        gains.append(0.0)
        return len(feature) - 1

    root_rows = np.arange(y.size)
    stack = [(new_node(root_rows), root_rows)]
    while stack:
        node, rows = stack.pop()
        yr = y[rows]
        if rows.size < 2 * min_leaf or yr.min() == yr.max():
            continue
        perm = rng.permutation(d)
        split = _best_split(x[rows], yr, perm[:n_candidates], min_leaf)
        if split is None and n_candidates < d:
            # none of the sampled features can split; try the rest
            split = _best_split(x[rows], yr, perm[n_candidates:], min_leaf)
        if split is None or split[0] < 0:
            continue
        g, f, thr = split
        go_left = x[rows, f] <= thr
        feature[node], threshold[node], gains[node] = f, thr, g
        lnode = new_node(rows[go_left])
        rnode = new_node(rows[~go_left])
        left[node], right[node] = lnode, rnode
        stack.append((rnode, rows[~go_left]))
        stack.append((lnode, rows[go_left]))
    return Tree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=float),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(proba, dtype=float).reshape(-1, 2),
        np.asarray(gains, dtype=float),
    )


def _check_labels(labels):
    y = np.asarray(labels).astype(np.int64).ravel()
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be binary (0/1)")
    counts = np.bincount(y, minlength=2)
    if counts.min() == 0:
        raise ValueError("both classes must be present")
    if counts.min() < 2:
        raise ValueError("need at least 2 samples per class")
    return y


def forest_fit(features, labels, config: ForestConfig = None, feature_names=None) -> ForestModel:
    """Fit a CART random forest (Gini, sqrt-feature sampling per node).

    Tree ``t`` draws all of its randomness from ``seed + t``, so trees can be
    grown in any order (or in parallel) with identical results.
    """
    cfg = config or ForestConfig()
    if cfg.n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    x = np.atleast_2d(np.asarray(features, dtype=float))
    y = _check_labels(labels)
    if x.shape[0] != y.size:
        raise ValueError("features and labels differ in length")
    d = x.shape[1]
    n_candidates = max(1, math.ceil(math.sqrt(d))) if cfg.max_features == "sqrt" else d
    trees = []
    for t in range(cfg.n_trees):
        rng = np.random.default_rng(cfg.seed + t)
        if cfg.bootstrap:
            rows = rng.integers(0, y.size, y.size)
        else:
            rows = np.arange(y.size)
        trees.append(_grow_tree(x[rows], y[rows], n_candidates, cfg.min_samples_leaf, rng))
    names = list(feature_names) if feature_names is not None else [f"f{i}" for i in range(d)]
    return ForestModel(trees, cfg.n_trees, cfg.max_features, cfg.seed, names, d)


def tree_predict_proba(tree: Tree, x) -> np.ndarray:
    node = np.zeros(x.shape[0], dtype=np.int64)
    active = tree.feature[node] >= 0
    while active.any():
        idx = np.nonzero(active)[0]
        nd = node[idx]
        go_left = x[idx, tree.feature[nd]] <= tree.threshold[nd]
        node[idx] = np.where(go_left, tree.left[nd], tree.right[nd])
        active = tree.feature[node] >= 0
    return tree.proba[node, 1]


def forest_predict_proba(model: ForestModel, features) -> np.ndarray:
    """Mean over trees of the leaf probability of class 1."""
    x = np.atleast_2d(np.asarray(features, dtype=float))
    if x.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {x.shape[1]}")
    if not model.trees:
        raise ValueError("empty forest")
    return np.mean([tree_predict_proba(t, x) for t in model.trees], axis=0)


def group_kfold(groups, n_folds: int = 5, seed: int = 0) -> GroupFoldPlan:
    """Shuffle the distinct groups with ``seed`` and deal them round-robin."""
    uniq = np.unique(np.asarray(groups))
    if n_folds < 2:
        raise ValueError("n_folds must be >= 2")
    if uniq.size < n_folds:
        raise ValueError(f"{uniq.size} groups cannot fill {n_folds} folds")
    rng = np.random.default_rng(seed)
    shuffled = uniq[rng.permutation(uniq.size)]
    folds = []
    for k in range(n_folds):
        test = np.sort(shuffled[k::n_folds])
        train = np.setdiff1d(uniq, test)
        folds.append((train, test))
    return GroupFoldPlan(tuple(folds), n_folds, seed)


def cross_validate(features, labels, groups, config: ForestConfig = None, n_folds: int = 5,
                   fold_seed: int = None) -> dict:
    """Grouped k-fold evaluation of the random forest.

    Features are standardized with training-fold statistics only. Accuracy
    uses a 0.5 probability cut. Means and (population) standard deviations
    are taken across folds.
    """
    cfg = config or ForestConfig()
    x = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(labels).astype(np.int64).ravel()
    g = np.asarray(groups)
    plan = group_kfold(g, n_folds, cfg.seed if fold_seed is None else fold_seed)
    per_fold = []
    for k, (train_groups, test_groups) in enumerate(plan.folds):
        if np.intersect1d(train_groups, test_groups).size:
            raise AssertionError("group leakage between train and test folds")
        tr = np.isin(g, train_groups)
        te = np.isin(g, test_groups)
        xtr, xte = standardize(x[tr], x[te])
        model = forest_fit(xtr, y[tr], cfg)
        p = forest_predict_proba(model, xte)
        per_fold.append({
            "fold": k,
            "n_test": int(te.sum()),
            "auc": roc_auc(y[te], p),
            "accuracy": accuracy(y[te], (p >= 0.5).astype(int)),
        })
    aucs = np.array([f["auc"] for f in per_fold])
    accs = np.array([f["accuracy"] for f in per_fold])
    return {
        "auc_mean": float(aucs.mean()),
        "auc_std": float(aucs.std()),
        "acc_mean": float(accs.mean()),
        "acc_std": float(accs.std()),
        "per_fold": per_fold,
    }


def holdout_validate(features, labels, groups, config: ForestConfig = None,
                     test_fraction: float = 0.5, split_seed: int = None) -> dict:
    """Single grouped train/test split instead of k folds.

    Distinct groups are shuffled with the seed and the first
    ``round(test_fraction * n_groups)`` of them form the test side.
    """
    cfg = config or ForestConfig()
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    x = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(labels).astype(np.int64).ravel()
    g = np.asarray(groups)
    uniq = np.unique(g)
    n_test = int(round(test_fraction * uniq.size))
    if n_test < 1 or n_test >= uniq.size:
        raise ValueError(f"{uniq.size} groups cannot be split at fraction {test_fraction}")
    rng = np.random.default_rng(cfg.seed if split_seed is None else split_seed)
    test_groups = uniq[rng.permutation(uniq.size)[:n_test]]
    te = np.isin(g, test_groups)
    tr = ~te
    xtr, xte = standardize(x[tr], x[te])
    model = forest_fit(xtr, y[tr], cfg)
    p = forest_predict_proba(model, xte)
    return {
        "auc": roc_auc(y[te], p),
        "accuracy": accuracy(y[te], (p >= 0.5).astype(int)),
        "n_train": int(tr.sum()),
        "n_test": int(te.sum()),
        "test_groups": np.sort(test_groups),
    }


def forest_to_text(model: ForestModel) -> str:
    meta = {
        "n_trees": model.n_trees,
        "max_features": model.max_features,
        "seed": model.seed,
        "feature_names": list(model.feature_names),
        "n_features": model.n_features,
    }
    arrays = {}
    for i, t in enumerate(model.trees):
        arrays[f"tree{i}.feature"] = encode_array(t.feature, "<i8")
        arrays[f"tree{i}.threshold"] = encode_array(t.threshold, "<f8")
        arrays[f"tree{i}.left"] = encode_array(t.left, "<i8")
        arrays[f"tree{i}.right"] = encode_array(t.right, "<i8")
        arrays[f"tree{i}.proba"] = encode_array(t.proba, "<f8")
        arrays[f"tree{i}.gain"] = encode_array(t.gain, "<f8")
    return dumps("random-forest", meta, arrays)


def forest_from_text(text: str) -> ForestModel:
    meta, arrays = loads(text, "random-forest")
    trees = []
    for i in range(meta["n_trees"]):
        parts = {k: decode_array(arrays[f"tree{i}.{k}"])
                 for k in ("feature", "threshold", "left", "right", "proba", "gain")}
        trees.append(Tree(**parts))
    return ForestModel(trees, meta["n_trees"], meta["max_features"], meta["seed"],
                       meta["feature_names"], meta["n_features"])
