"""Hot inner loops, with a numba path and a pure-numpy path.

The numba versions are used when numba imports cleanly and the environment
variable ``LFMVC_DISABLE_NUMBA`` is unset (or ``0``). Both paths are always
importable as ``*_numpy`` / ``*_numba`` so they can be benchmarked and
cross-checked against each other.
"""
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def _flag_disabled():
    return os.environ.get("LFMVC_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAS_NUMBA and not _flag_disabled()


# --------------------------------------------------------------------------
# numpy reference implementations
# --------------------------------------------------------------------------

def nearest_center_numpy(X, C):
    """Return (labels, squared distance to the assigned center).

    Ties go to the lowest center index.
    """
    # |x|^2 - 2 x.c + |c|^2 loses precision near zero; use explicit differences
    d = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d, axis=1)
    return labels.astype(np.int64), d[np.arange(X.shape[0]), labels]


def center_sums_numpy(X, labels, k):
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, labels, X)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts


def neighbor_counts_numpy(K, tau):
    n = K.shape[0]
    S = np.array(K, dtype=np.float64, copy=True)
    np.fill_diagonal(S, np.inf)
    # stable sort on the negated row keeps ascending index among ties
    order = np.argsort(-S, axis=1, kind="stable")[:, :tau]
    return np.bincount(order.ravel(), minlength=n).astype(np.int64)


def contingency_numpy(pred, truth, kp, kt):
    table = np.zeros((kp, kt), dtype=np.int64)
    np.add.at(table, (pred, truth), 1)
    return table


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def nearest_center_numba(X, C):
        n, d = X.shape
        k = C.shape[0]
        labels = np.empty(n, dtype=np.int64)
        dist = np.empty(n)
        for i in range(n):
            best = np.inf
            arg = 0
            for c in range(k):
                s = 0.0
                for j in range(d):
                    t = X[i, j] - C[c, j]
                    s += t * t
                if s < best:
                    best = s
                    arg = c
            labels[i] = arg
            dist[i] = best
        return labels, dist

    @njit(cache=True)
    def center_sums_numba(X, labels, k):
        n, d = X.shape
        sums = np.zeros((k, d))
        counts = np.zeros(k, dtype=np.int64)
        for i in range(n):
            c = labels[i]
            counts[c] += 1
            for j in range(d):
                sums[c, j] += X[i, j]
        return sums, counts

    @njit(cache=True)
    def neighbor_counts_numba(K, tau):
        n = K.shape[0]
        counts = np.zeros(n, dtype=np.int64)
        row = np.empty(n)
        for i in range(n):
            for j in range(n):
                row[j] = -K[i, j]
            row[i] = -np.inf
            order = np.argsort(row, kind="mergesort")
            for r in range(tau):
                counts[order[r]] += 1
        return counts

    @njit(cache=True)
    def contingency_numba(pred, truth, kp, kt):
        table = np.zeros((kp, kt), dtype=np.int64)
        for i in range(pred.shape[0]):
            table[pred[i], truth[i]] += 1
        return table

else:  # pragma: no cover
    nearest_center_numba = nearest_center_numpy
    center_sums_numba = center_sums_numpy
    neighbor_counts_numba = neighbor_counts_numpy
    contingency_numba = contingency_numpy


def backend():
    return "numba" if USE_NUMBA else "numpy"


def nearest_center(X, C):
    X = np.ascontiguousarray(X, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    if USE_NUMBA:
        return nearest_center_numba(X, C)
    return nearest_center_numpy(X, C)


def center_sums(X, labels, k):
    X = np.ascontiguousarray(X, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if USE_NUMBA:
        return center_sums_numba(X, labels, int(k))
    return center_sums_numpy(X, labels, int(k))


def neighbor_counts(K, tau):
    K = np.ascontiguousarray(K, dtype=np.float64)
    if USE_NUMBA:
        return neighbor_counts_numba(K, int(tau))
    return neighbor_counts_numpy(K, int(tau))


def contingency(pred, truth, kp, kt):
    pred = np.ascontiguousarray(pred, dtype=np.int64)
    truth = np.ascontiguousarray(truth, dtype=np.int64)
    if USE_NUMBA:
        return contingency_numba(pred, truth, int(kp), int(kt))
    return contingency_numpy(pred, truth, int(kp), int(kt))
