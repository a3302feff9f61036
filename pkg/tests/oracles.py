"""Independent brute-force oracles used to check the library implementations.

Everything here is deliberately written in the most literal way possible
(scalar loops, textbook formulas) and stays independent of the code paths it
verifies.
"""

import math
import statistics

import numpy as np


def welch_t_brute(values0, values1):
    """Two-sample Welch t statistic of group 1 against group 0, scalar math."""
    n0, n1 = len(values0), len(values1)
    m0 = sum(values0) / n0
    m1 = sum(values1) / n1
    v0 = sum((v - m0) ** 2 for v in values0) / (n0 - 1)
    v1 = sum((v - m1) ** 2 for v in values1) / (n1 - 1)
    denom = math.sqrt(v1 / n1 + v0 / n0)
    if denom == 0.0:
        if m1 == m0:
            return 0.0
        return math.copysign(1e6, m1 - m0)
    return (m1 - m0) / denom


def pairwise_dist_brute(a, b):
    """Scalar-loop Euclidean distance matrix."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros((a.shape[0], b.shape[0]))
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i, j] = math.sqrt(sum((a[i, t] - b[j, t]) ** 2 for t in range(a.shape[1])))
    return out


def auroc_brute(scores, labels):
    """Pairwise definition: (#{s+ > s-} + 0.5 #ties) / (P * N)."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                wins += 1.0
            elif sp == sn:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def median_brute(values):
    return statistics.median(values)


def jacobi_eigh(matrix, sweeps=100, tol=1e-13):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors-as-columns), both unsorted.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(sweeps):
        off = math.sqrt(sum(a[p, q] ** 2 for p in range(n) for q in range(n) if p != q))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    return np.diag(a).copy(), v


def pca_components_brute(X, r):
    """Top-r eigenvectors of the population covariance, via the Jacobi oracle,
    with the largest-absolute-entry-positive sign convention applied."""
    X = np.asarray(X, dtype=float)
    xc = X - X.mean(axis=0)
    cov = xc.T @ xc / X.shape[0]
    vals, vecs = jacobi_eigh(cov)
    order = np.argsort(-vals, kind="stable")[:r]
    comps = vecs[:, order].T.copy()
    for i in range(comps.shape[0]):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return np.maximum(vals[order], 0.0), comps
