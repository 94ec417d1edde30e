"""Spectral base partitions, neighbourhood aggregates and Lloyd rounding."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _accel
from .errors import InvalidK, InvalidShape, InvalidTau, NumericalFailure
from .kernels import average_kernel

ORTHO_TOL = 1e-8


def orthonormality_error(H):
    H = np.asarray(H)
    return float(np.max(np.abs(H.T @ H - np.eye(H.shape[1]))))


def sign_fix(V):
    """Flip each column so its largest-magnitude entry is positive."""
    V = np.array(V, dtype=np.float64, copy=True)
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def top_k_eigvecs(K, k, return_values=False):
    """Eigenvectors of the ``k`` largest eigenvalues of a symmetric ``K``.

    Columns are ordered by decreasing eigenvalue and sign-normalised with
    :func:`sign_fix`. Under eigenvalue ties any orthonormal basis of the
    invariant subspace may come back.
    """
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidShape(f"kernel must be square, got {K.shape}")
    n = K.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    try:
        w, V = scipy.linalg.eigh(K, subset_by_index=[n - k, n - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"symmetric eigensolver failed: {exc}") from exc
    w = w[::-1]
    H = sign_fix(V[:, ::-1])
    if return_values:
        return H, w
    return H


def base_partitions(kernels, k):
    kernels = [np.asarray(K, dtype=np.float64) for K in kernels]
    sizes = {K.shape for K in kernels}
    if len(sizes) != 1:
        raise InvalidShape(f"kernels disagree on shape: {sorted(sizes)}")
    return [top_k_eigvecs(K, k) for K in kernels]


def regularizer_partition(kernels, k):
    """Kernel k-means partition of the uniformly averaged kernel."""
    return top_k_eigvecs(average_kernel(kernels), k)


def tau_from_fraction(fraction, n):
    """Neighbour count for a fraction of ``n``, rounded half-up, at least 1."""
    if not 0 < fraction <= 1:
        raise InvalidTau(f"tau fraction must lie in (0, 1], got {fraction}")
    return int(min(n, max(1, np.floor(fraction * n + 0.5))))


@dataclass(frozen=True)
class NeighborAggregate:
    """How many samples list each sample among their tau nearest neighbours.

    ``counts`` is the diagonal of the sum over samples of the 0/1 neighbour
    selector matrices.
    """

    counts: np.ndarray
    tau: int
    view_id: object = None

    @property
    def n(self):
        return self.counts.shape[0]


def neighbor_aggregate(K, tau, view_id=None):
    """Count neighbourhood memberships under kernel similarity.

    Each sample's neighbourhood is itself plus its ``tau - 1`` most similar
    other samples; equal similarities are resolved by ascending index.
    """
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidShape(f"kernel must be square, got {K.shape}")
    n = K.shape[0]
    if int(tau) != tau or not 1 <= tau <= n:
        raise InvalidTau(f"tau must be an integer in [1, {n}], got {tau}")
    counts = _accel.neighbor_counts(K, int(tau))
    return NeighborAggregate(counts=counts, tau=int(tau), view_id=view_id)


# --------------------------------------------------------------------------
# Lloyd rounding
# --------------------------------------------------------------------------

def normalize_rows(P):
    P = np.asarray(P, dtype=np.float64)
    norms = np.linalg.norm(P, axis=1, keepdims=True)
    return np.divide(P, norms, out=np.zeros_like(P), where=norms > 0)


def kmeans_plusplus(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centers[0] = X[first]
    d2 = ((X - X[first]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[c] = X[idx]
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(axis=1))
    return centers


def _lloyd_once(X, k, rng, max_iter):
    C = kmeans_plusplus(X, k, rng)
    prev = None
    for _ in range(max_iter):
        labels, dist = _accel.nearest_center(X, C)
        labels = labels.copy()
        dist = dist.copy()
        sums, counts = _accel.center_sums(X, labels, k)
        for c in np.flatnonzero(counts == 0):
            # move the point farthest from its centroid, never emptying its source
            cand = np.where(counts[labels] > 1, dist, -1.0)
            far = int(np.argmax(cand))
            src = labels[far]
            labels[far] = c
            counts[src] -= 1
            counts[c] += 1
            sums[src] -= X[far]
            sums[c] += X[far]
            dist[far] = 0.0
        C = sums / counts[:, None]
        if prev is not None and np.array_equal(labels, prev):
            break
        prev = labels
    inertia = float(((X - C[labels]) ** 2).sum())
    return labels, inertia


def lloyd_round(P, k, restarts=1, seed=0, row_normalize=True, max_iter=300):
    """Discretise a relaxed partition with restarted k-means++ / Lloyd.

    Restart ``r`` draws from the ``r``-th child of ``SeedSequence(seed)``,
    so the first ``r`` restarts are shared between calls that differ only in
    ``restarts``. Returns the labelling of lowest within-cluster sum of
    squares (earliest restart on ties) and that sum.
    """
    X = np.asarray(P, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidShape(f"partition must be 2-D, got {X.shape}")
    n = X.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    if row_normalize:
        X = normalize_rows(X)
    if isinstance(seed, np.random.SeedSequence):
        # fresh copy: spawn() advances the caller's sequence otherwise
        ss = np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key)
    else:
        ss = np.random.SeedSequence(seed)
    best_labels, best_inertia = None, np.inf
    for child in ss.spawn(restarts):
        labels, inertia = _lloyd_once(X, k, np.random.default_rng(child), max_iter)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels, best_inertia
