"""Binary classification metrics shared by the classifier and outlier benches."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata


def _binary(truth):
    y = np.asarray(truth).astype(int).ravel()
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be binary (0/1)")
    return y


def roc_auc(truth, scores) -> float:
    """Area under the ROC curve as the Mann-Whitney rank statistic.

    Tied scores receive their average rank, so a tie between a positive and
    a negative counts one half.
    """
    y = _binary(truth)
    s = np.asarray(scores, dtype=float).ravel()
    if s.size != y.size:
        raise ValueError("truth and scores differ in length")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC is undefined when only one class is present")
    ranks = rankdata(s, method="average")
    return float((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def accuracy(truth, predicted) -> float:
    y = _binary(truth)
    p = _binary(predicted)
    if y.size != p.size:
        raise ValueError("truth and predictions differ in length")
    if y.size == 0:
        raise ValueError("empty input")
    return float(np.mean(y == p))
