"""Reference multiple-kernel methods: averaged kernel, best single view, MKKM."""
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateResidual
from .kernels import average_kernel
from .metrics import evaluate
from .partition import lloyd_round, top_k_eigvecs


def kernel_kmeans(K, k, restarts=1, seed=0, row_normalize=True):
    H = top_k_eigvecs(K, k)
    labels, _ = lloyd_round(H, k, restarts=restarts, seed=seed, row_normalize=row_normalize)
    return labels, H


def a_mkkm(kernels, k, restarts=1, seed=0, row_normalize=True):
    """Kernel k-means on the uniformly averaged kernel."""
    return kernel_kmeans(average_kernel(kernels), k, restarts, seed, row_normalize)


def sb_kkm(kernels, k, truth, restarts=1, seed=0, row_normalize=True):
    """Single best view, chosen by ACC against ``truth`` (lowest index wins ties)."""
    views = []
    for p, K in enumerate(kernels):
        labels, H = kernel_kmeans(K, k, restarts, seed, row_normalize)
        views.append({"view": p, "labels": labels, "H": H, **evaluate(labels, truth)})
    best = max(range(len(views)), key=lambda p: (views[p]["acc"], -p))
    return {"views": views, "best": best}


@dataclass
class MkkmState:
    beta: np.ndarray
    H: np.ndarray
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def residuals(kernels, H):
    """``a_p = Tr(K_p (I - H H^T))`` for each kernel."""
    return np.array([np.trace(K) - np.sum(H * (K @ H)) for K in kernels])


def mkkm_weights(a):
    """Simplex minimiser of ``sum_p beta_p^2 a_p``: ``beta_p`` proportional to ``1/a_p``."""
    a = np.asarray(a, dtype=np.float64)
    if np.any(a <= 0):
        raise DegenerateResidual(f"non-positive residual(s) {a.tolist()}: a kernel is fully explained by H")
    inv = 1.0 / a
    return inv / inv.sum()


def mkkm(kernels, k, eps0=1e-4, max_iter=100):
    kernels = [np.asarray(K, dtype=np.float64) for K in kernels]
    m = len(kernels)
    beta = np.full(m, 1.0 / m)
    state = MkkmState(beta=beta, H=None)
    for it in range(1, max_iter + 1):
        Kb = sum(b * b * K for b, K in zip(beta, kernels))
        H = top_k_eigvecs(Kb, k)
        a = residuals(kernels, H)
        # objective at (H, old beta); the beta step below can only lower it
        if not state.objective_trace:
            state.objective_trace.append(float(np.sum(beta ** 2 * a)))
        try:
            beta = mkkm_weights(a)
        except DegenerateResidual:
            beta = np.zeros(m)
            beta[int(np.flatnonzero(a <= 0)[0])] = 1.0
        obj = float(np.sum(beta ** 2 * a))
        prev = state.objective_trace[-1]
        state.objective_trace.append(obj)
        state.beta, state.H, state.iterations = beta, H, it
        if prev - obj <= eps0 * max(abs(obj), np.finfo(float).tiny):
            state.converged = True
            break
    return state
