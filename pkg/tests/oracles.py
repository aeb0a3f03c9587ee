"""Slow, obviously-correct reference implementations used as test oracles.

These deliberately avoid numpy vectorisation and share no code with the
package, so an agreement is meaningful.
"""

import math


def sampen_oracle(x, m, r):
    x = [float(v) for v in x]
    n = len(x)
    n_t = n - m

    def match(i, j, length):
        return all(abs(x[i + k] - x[j + k]) <= r for k in range(length))

    a = b = 0
    for i in range(n_t):
        for j in range(i + 1, n_t):
            if match(i, j, m):
                b += 1
                if match(i, j, m + 1):
                    a += 1
    return a, b


def apen_oracle(x, m, r):
    x = [float(v) for v in x]
    n = len(x)

    def phi(length):
        n_t = n - length + 1
        total = 0.0
        for i in range(n_t):
            c = 0
            for j in range(n_t):
                if all(abs(x[i + k] - x[j + k]) <= r for k in range(length)):
                    c += 1
            total += math.log(c / n_t)
        return total / n_t

    return phi(m) - phi(m + 1)


def knn_oracle(train, test, k):
    out = []
    for q in test:
        d = sorted(math.dist(q, p) for p in train)
        out.append(d[k - 1])
    return out


def auc_oracle(truth, scores):
    pos = [s for s, t in zip(scores, truth) if t == 1]
    neg = [s for s, t in zip(scores, truth) if t == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def accuracy_oracle(truth, pred):
    tp = tn = fp = fn = 0
    for t, p in zip(truth, pred):
        if t == 1 and p == 1:
            tp += 1
        elif t == 0 and p == 0:
            tn += 1
        elif p == 1:
            fp += 1
        else:
            fn += 1
    return (tp + tn) / (tp + tn + fp + fn)


def decode_212_pair(b0, b1, b2):
    """Two samples from one byte triple, nibble by nibble."""
    low_nibble = b1 % 16
    high_nibble = b1 // 16
    s1 = b0 + 256 * low_nibble
    s2 = b2 + 256 * high_nibble
    if s1 > 2047:
        s1 -= 4096
    if s2 > 2047:
        s2 -= 4096
    return s1, s2


def pearson_kurtosis(x):
    n = len(x)
    mu = sum(x) / n
    m2 = sum((v - mu) ** 2 for v in x) / n
    m4 = sum((v - mu) ** 4 for v in x) / n
    return m4 / m2**2


def pearson_skewness(x):
    n = len(x)
    mu = sum(x) / n
    m2 = sum((v - mu) ** 2 for v in x) / n
    m3 = sum((v - mu) ** 3 for v in x) / n
    return m3 / m2**1.5
