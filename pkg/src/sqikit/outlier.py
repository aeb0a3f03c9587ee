"""Unsupervised detection of noisy windows from their SQI feature vectors.

Three scorers are provided (k-NN distance, isolation forest and a small
fully-connected autoencoder), each producing scores where higher means more
anomalous, plus contamination-based thresholding and evaluation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import digamma

from .metrics import accuracy, roc_auc
from .serialize import decode_array, dumps, encode_array, loads

ALGOS = ("knn", "iforest", "ae")
EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class OutlierScores:
    scores: np.ndarray
    algo_id: str
    threshold: float = float("nan")
    labels_pred: np.ndarray = None

    def __post_init__(self):
        if self.algo_id not in ALGOS:
            raise ValueError(f"unknown algorithm {self.algo_id!r}")


def standardize(train, test=None, eps: float = 0.0):
    """Z-score columns with the training mean and std (constant columns -> 0)."""
    train = np.asarray(train, dtype=float)
    mu = train.mean(axis=0)
    sd = train.std(axis=0)
    sd = np.where(sd > eps, sd, 1.0)
    out_train = (train - mu) / sd
    if test is None:
        return out_train
    return out_train, (np.asarray(test, dtype=float) - mu) / sd


# ---------------------------------------------------------------------------
# k-nearest-neighbour distance
# ---------------------------------------------------------------------------


def knn_scores(train, test, k: int = 5) -> OutlierScores:
    """Euclidean distance from each test row to its k-th nearest training row.

    Columns are used as given; standardize them beforehand (see
    :func:`standardize`). A test row that also appears in ``train`` counts
    itself as its own nearest neighbour.
    """
    train = np.atleast_2d(np.asarray(train, dtype=float))
    test = np.atleast_2d(np.asarray(test, dtype=float))
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > train.shape[0]:
        raise ValueError(f"k={k} exceeds the training size {train.shape[0]}")
    if train.shape[1] != test.shape[1]:
        raise ValueError("train and test feature counts differ")
    d = cdist(test, train)
    kth = np.partition(d, k - 1, axis=1)[:, k - 1]
    return OutlierScores(kth, "knn")


# ---------------------------------------------------------------------------
# isolation forest
# ---------------------------------------------------------------------------


def average_path_length(n) -> np.ndarray:
    """Expected path length of an unsuccessful BST search over ``n`` points.

    ``c(n) = 2 H(n-1) - 2 (n-1) / n`` with exact harmonic numbers;
    ``c(1) = 0`` and ``c(2) = 1``.
    """
    n = np.asarray(n, dtype=float)
    out = np.zeros_like(n)
    big = n > 2
    harmonic = digamma(n[big]) + EULER_GAMMA  # H(n-1)
    out[big] = 2.0 * harmonic - 2.0 * (n[big] - 1.0) / n[big]
    out[n == 2] = 1.0
    return out


@dataclass
class IsolationTree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    size: np.ndarray  # samples reaching each leaf


@dataclass
class IsolationForestModel:
    trees: list
    subsample_size: int
    n_trees: int
    seed: int
    n_features: int


def _grow_isolation_tree(x, height_cap, rng) -> IsolationTree:
    feature, threshold, left, right, size = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        size.append(0)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(x.shape[0]), 0)]
    while stack:
        node, rows, depth = stack.pop()
        size[node] = rows.size
        if depth >= height_cap or rows.size <= 1:
            continue
        sub = x[rows]
        lo = sub.min(axis=0)
        hi = sub.max(axis=0)
        splittable = np.nonzero(hi > lo)[0]
        if splittable.size == 0:
            continue
        f = int(splittable[rng.integers(splittable.size)])
        v = rng.uniform(lo[f], hi[f])
        while not lo[f] < v < hi[f]:
            v = rng.uniform(lo[f], hi[f])
        go_left = sub[:, f] < v
        feature[node] = f
        threshold[node] = float(v)
        lnode = new_node()
        rnode = new_node()
        left[node], right[node] = lnode, rnode
        stack.append((rnode, rows[~go_left], depth + 1))
        stack.append((lnode, rows[go_left], depth + 1))
    return IsolationTree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(size, dtype=np.int64),
    )


def iforest_fit(train, n_trees: int = 100, subsample: int = 256, seed: int = 0) -> IsolationForestModel:
    """Grow ``n_trees`` isolation trees on random subsamples (no replacement).

    The subsample is capped at the training size, and tree height at
    ``ceil(log2(subsample))``.
    """
    x = np.atleast_2d(np.asarray(train, dtype=float))
    if x.shape[0] == 0:
        raise ValueError("empty training set")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if subsample < 1:
        raise ValueError("subsample must be >= 1")
    psi = min(subsample, x.shape[0])
    height_cap = int(np.ceil(np.log2(psi))) if psi > 1 else 0
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        rows = rng.choice(x.shape[0], size=psi, replace=False)
        trees.append(_grow_isolation_tree(x[rows], height_cap, rng))
    return IsolationForestModel(trees, psi, n_trees, seed, x.shape[1])


def _path_lengths(tree: IsolationTree, x) -> np.ndarray:
    node = np.zeros(x.shape[0], dtype=np.int64)
    depth = np.zeros(x.shape[0])
    active = tree.feature[node] >= 0
    while active.any():
        idx = np.nonzero(active)[0]
        nd = node[idx]
        go_left = x[idx, tree.feature[nd]] < tree.threshold[nd]
        node[idx] = np.where(go_left, tree.left[nd], tree.right[nd])
        depth[idx] += 1.0
        active = tree.feature[node] >= 0
    return depth + average_path_length(tree.size[node])


def iforest_scores(model: IsolationForestModel, test) -> OutlierScores:
    """Anomaly score ``2 ** (-E[h(x)] / c(subsample))``, in (0, 1)."""
    x = np.atleast_2d(np.asarray(test, dtype=float))
    if x.shape[1] != model.n_features:
        raise ValueError("feature count does not match the model")
    mean_h = np.mean([_path_lengths(t, x) for t in model.trees], axis=0)
    norm = float(average_path_length(model.subsample_size))
    if norm == 0.0:
        return OutlierScores(np.full(x.shape[0], 0.5), "iforest")
    return OutlierScores(np.power(2.0, -mean_h / norm), "iforest")


def iforest_to_text(model: IsolationForestModel) -> str:
    meta = {
        "subsample_size": model.subsample_size,
        "n_trees": model.n_trees,
        "seed": model.seed,
        "n_features": model.n_features,
    }
    arrays = {}
    for i, t in enumerate(model.trees):
        arrays[f"tree{i}.feature"] = encode_array(t.feature, "<i8")
        arrays[f"tree{i}.threshold"] = encode_array(t.threshold, "<f8")
        arrays[f"tree{i}.left"] = encode_array(t.left, "<i8")
        arrays[f"tree{i}.right"] = encode_array(t.right, "<i8")
        arrays[f"tree{i}.size"] = encode_array(t.size, "<i8")
    return dumps("isolation-forest", meta, arrays)


def iforest_from_text(text: str) -> IsolationForestModel:
    meta, arrays = loads(text, "isolation-forest")
    trees = []
    for i in range(meta["n_trees"]):
        parts = {k: decode_array(arrays[f"tree{i}.{k}"]) for k in ("feature", "threshold", "left", "right", "size")}
        trees.append(IsolationTree(**parts))
    return IsolationForestModel(trees, meta["subsample_size"], meta["n_trees"], meta["seed"], meta["n_features"])


# ---------------------------------------------------------------------------
# autoencoder reconstruction error
# ---------------------------------------------------------------------------


@dataclass
class AeOutlierConfig:
    hidden: tuple = (8, 4, 8)
    epochs: int = 100
    lr: float = 1e-3
    batch_size: int = 32
    seed: int = 0


def _canonical_columns(x):
    # order columns by their contents so a column permutation of the input
    # trains exactly the same network
    return np.lexsort(x[::-1])


def _fc_init(sizes, rng):
    params = []
    for a, b in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (a + b))
        params.append([rng.uniform(-limit, limit, (a, b)), np.zeros(b)])
    return params


def _fc_forward(params, x):
    acts = [x]
    h = x
    for i, (w, b) in enumerate(params):
        h = h @ w + b
        if i < len(params) - 1:
            h = np.tanh(h)
        acts.append(h)
    return acts


def _fc_grads(params, acts, target):
    out = acts[-1]
    diff = out - target
    loss = float(np.mean(diff * diff))
    delta = 2.0 * diff / diff.size
    grads = [None] * len(params)
    for i in range(len(params) - 1, -1, -1):
        w, _ = params[i]
        grads[i] = (acts[i].T @ delta, delta.sum(axis=0))
        if i > 0:
            delta = (delta @ w.T) * (1.0 - acts[i] ** 2)
    return loss, grads


def ae_outlier_scores(features, config: AeOutlierConfig = None) -> OutlierScores:
    """Reconstruction error of a d -> 8 -> 4 -> 8 -> d tanh autoencoder.

    The network is trained with Adam on all rows of ``features`` (which
    should already be standardized); each row's score is its mean squared
    reconstruction error.
    """
    cfg = config or AeOutlierConfig()
    x = np.atleast_2d(np.asarray(features, dtype=float))
    if x.shape[0] < min(cfg.hidden):
        raise ValueError("fewer samples than the bottleneck width")
    x = x[:, _canonical_columns(x)]
    d = x.shape[1]
    rng = np.random.default_rng(cfg.seed)
    params = _fc_init((d, *cfg.hidden, d), rng)
    m = [[np.zeros_like(p) for p in layer] for layer in params]
    v = [[np.zeros_like(p) for p in layer] for layer in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(x.shape[0])
        for start in range(0, x.shape[0], cfg.batch_size):
            xb = x[order[start : start + cfg.batch_size]]
            _, grads = _fc_grads(params, _fc_forward(params, xb), xb)
            step += 1
            for li, layer in enumerate(params):
                for pi in range(2):
                    g = grads[li][pi]
                    m[li][pi] = beta1 * m[li][pi] + (1 - beta1) * g
                    v[li][pi] = beta2 * v[li][pi] + (1 - beta2) * g * g
                    mh = m[li][pi] / (1 - beta1**step)
                    vh = v[li][pi] / (1 - beta2**step)
                    layer[pi] = layer[pi] - cfg.lr * mh / (np.sqrt(vh) + eps)
    recon = _fc_forward(params, x)[-1]
    return OutlierScores(np.mean((recon - x) ** 2, axis=1), "ae")


# ---------------------------------------------------------------------------
# thresholding and evaluation
# ---------------------------------------------------------------------------


def threshold_by_contamination(scores: OutlierScores, contamination: float) -> OutlierScores:
    """Flag the ``round(contamination * n)`` highest scores.

    The reported threshold is the ``1 - contamination`` quantile. Ties are
    resolved by flagging the lower sample index first, so the flagged count
    is exact even when several samples share the boundary score.
    """
    if not 0 < contamination < 1:
        raise ValueError("contamination must lie in (0, 1)")
    s = np.asarray(scores.scores, dtype=float)
    n = s.size
    thr = float(np.quantile(s, 1.0 - contamination))
    flags = np.zeros(n, dtype=np.int64)
    if n and np.all(s == s[0]):
        warnings.warn("all scores are equal; no sample flagged", RuntimeWarning, stacklevel=2)
        return OutlierScores(s, scores.algo_id, thr, flags)
    n_flag = int(round(contamination * n))
    order = np.lexsort((np.arange(n), -s))  # by score desc, then index asc
    flags[order[:n_flag]] = 1
    return OutlierScores(s, scores.algo_id, thr, flags)


def evaluate_outliers(scores: OutlierScores, truth) -> dict:
    out = {"auc": roc_auc(truth, scores.scores)}
    if scores.labels_pred is not None:
        out["accuracy"] = accuracy(truth, scores.labels_pred)
    return out
