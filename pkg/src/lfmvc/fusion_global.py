"""Late-fusion alignment maximisation with global alignment.

The solver maximises

    sum_p beta_p Tr(F^T H_p W_p) + lambda Tr(F^T M)

over column-orthonormal ``F``, orthogonal ``W_p`` and nonnegative unit-norm
``beta`` by cycling through three closed-form updates (F, then every W_p,
then beta). The same engine drives the local variant, which only swaps
``H_p`` for count-weighted ``D_p H_p`` and ``M`` for ``D M``.
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from .errors import DegenerateDelta, InvalidShape, NonMonotoneObjective, RankDeficientU

log = logging.getLogger(__name__)

EPS0 = 1e-4
MAX_ITER = 100
LAMBDA_GRID = tuple(2.0 ** e for e in range(-5, 6))
MONOTONE_TOL = 1e-9


@dataclass
class FusionResult:
    F: np.ndarray
    rotations: list
    beta: np.ndarray
    objective_trace: list
    iterations: int
    converged: bool
    lam: float = 0.0
    rank_deficient: bool = False
    # (F, rotations, beta) per iteration, index 0 = initial point
    iterates: list = None
    labels: np.ndarray = None
    inertia: float = None
    extra: dict = field(default_factory=dict)

    @property
    def objective(self):
        return self.objective_trace[-1]


def _check_partitions(partitions):
    partitions = [np.asarray(H, dtype=np.float64) for H in partitions]
    if not partitions:
        raise InvalidShape("need at least one base partition")
    shape = partitions[0].shape
    if len(shape) != 2:
        raise InvalidShape(f"partitions must be n x k, got {shape}")
    for p, H in enumerate(partitions):
        if H.shape != shape:
            raise InvalidShape(f"partition {p} has shape {H.shape}, expected {shape}")
    return partitions


def procrustes(U, strict=False):
    """Column-orthonormal ``F`` maximising ``Tr(F^T U)``.

    Returns ``(F, singular_values, rank_deficient)``. With ``U = S diag(s) V^T``
    (thin SVD) the maximiser is ``S V^T`` and the optimum is ``sum(s)``. When
    ``U`` has rank below its column count the thin SVD still returns an
    orthonormal completion of ``S``; ``strict`` turns that case into an error.
    """
    U = np.asarray(U, dtype=np.float64)
    S, s, Vt = np.linalg.svd(U, full_matrices=False)
    tol = max(U.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    deficient = bool(s.size == 0 or s[-1] <= tol)
    if deficient and strict:
        raise RankDeficientU(f"U has numerical rank < {U.shape[1]} (smallest singular value {s[-1]:.3g})")
    return S @ Vt, s, deficient


def polar_rotation(L):
    """Orthogonal ``W`` maximising ``Tr(W^T L)`` for square ``L``."""
    S, _, Gt = np.linalg.svd(np.asarray(L, dtype=np.float64))
    return S @ Gt


def combine(partitions, rotations, beta):
    """``B = sum_p beta_p H_p W_p``."""
    B = np.zeros_like(np.asarray(partitions[0], dtype=np.float64))
    for H, W, b in zip(partitions, rotations, beta):
        B += b * (H @ W)
    return B


def gam_objective(F, partitions, rotations, beta, M, lam):
    partitions = _check_partitions(partitions)
    F = np.asarray(F, dtype=np.float64)
    M = np.asarray(M, dtype=np.float64)
    n, k = partitions[0].shape
    if F.shape != (n, k) or M.shape != (n, k):
        raise InvalidShape(f"F {F.shape} and M {M.shape} must both be {(n, k)}")
    if len(rotations) != len(partitions) or len(beta) != len(partitions):
        raise InvalidShape("need one rotation and one weight per partition")
    for W in rotations:
        if np.shape(W) != (k, k):
            raise InvalidShape(f"rotation has shape {np.shape(W)}, expected {(k, k)}")
    B = combine(partitions, rotations, beta)
    return float(np.sum(F * B) + lam * np.sum(F * M))


def update_F_global(partitions, rotations, beta, M, lam, strict=False):
    U = combine(_check_partitions(partitions), rotations, beta) + lam * np.asarray(M, dtype=np.float64)
    return procrustes(U, strict=strict)[0]


def update_W_global(H_p, F, beta_p=1.0):
    """Best rotation for one view; ``beta_p >= 0`` does not change the argmax."""
    return polar_rotation(np.asarray(H_p).T @ np.asarray(F))


def update_beta(delta):
    """Maximiser of ``beta . delta`` on the nonnegative part of the unit sphere.

    Negative entries (floating-point noise around zero) are clamped first.
    """
    d = np.clip(np.asarray(delta, dtype=np.float64), 0.0, None)
    norm = float(np.linalg.norm(d))
    if not norm > 0:
        raise DegenerateDelta(f"every alignment score is <= 0: {np.asarray(delta).tolist()}")
    return d / norm


def alignment_scores(F, weighted, rotations):
    return np.array([np.sum(F * (G @ W)) for G, W in zip(weighted, rotations)])


def sweep(weighted, reg, rotations, beta):
    """One F -> {W_p} -> beta pass; ``reg`` is the already-scaled regulariser term."""
    U = reg.copy()
    for G, W, b in zip(weighted, rotations, beta):
        U += b * (G @ W)
    F, _, deficient = procrustes(U)
    rotations = [polar_rotation(G.T @ F) for G in weighted]
    beta = update_beta(alignment_scores(F, weighted, rotations))
    return F, rotations, beta, deficient


def run_alternating(weighted, R, lam, eps0=EPS0, max_iter=MAX_ITER, F0=None,
                    retain_iterates=False, check_monotone=True):
    """Shared F -> W -> beta loop.

    ``weighted[p]`` is the (possibly count-weighted) base partition and ``R``
    the regulariser term. ``F0`` is the consensus partition the initial
    objective is evaluated at (defaults to the normalised regulariser).
    """
    weighted = [np.asarray(G, dtype=np.float64) for G in weighted]
    R = np.asarray(R, dtype=np.float64)
    m = len(weighted)
    n, k = weighted[0].shape
    rotations = [np.eye(k) for _ in range(m)]
    beta = np.full(m, 1.0 / np.sqrt(m))
    F = procrustes(R)[0] if F0 is None else np.asarray(F0, dtype=np.float64)
    reg = lam * R

    def objective(F, rotations, beta):
        return float(beta @ alignment_scores(F, weighted, rotations) + np.sum(F * reg))

    trace = [objective(F, rotations, beta)]
    iterates = [(F.copy(), [W.copy() for W in rotations], beta.copy())] if retain_iterates else None
    converged = False
    deficient = False
    it = 0
    for it in range(1, max_iter + 1):
        F, rotations, beta, bad = sweep(weighted, reg, rotations, beta)
        deficient |= bad
        obj = objective(F, rotations, beta)
        prev = trace[-1]
        trace.append(obj)
        if retain_iterates:
            iterates.append((F.copy(), [W.copy() for W in rotations], beta.copy()))
        if check_monotone and obj < prev - MONOTONE_TOL * max(1.0, abs(prev)):
            raise NonMonotoneObjective(f"objective fell from {prev!r} to {obj!r} at iteration {it}")
        if abs(obj - prev) <= eps0 * max(abs(obj), np.finfo(float).tiny):
            converged = True
            break
    log.debug("alternating solver: %d iterations, objective %.6g, converged=%s", it, trace[-1], converged)
    return FusionResult(F=F, rotations=rotations, beta=beta, objective_trace=trace, iterations=it,
                        converged=converged, lam=float(lam), rank_deficient=deficient, iterates=iterates)


def lf_mvc_gam(partitions, M, lam=1.0, eps0=EPS0, max_iter=MAX_ITER, retain_iterates=False):
    """Global late-fusion alignment maximisation.

    Starts from ``W_p = I``, ``beta = 1/sqrt(m)`` and ``F = M``; the first
    entry of ``objective_trace`` is the objective at that starting point.
    """
    partitions = _check_partitions(partitions)
    M = np.asarray(M, dtype=np.float64)
    if M.shape != partitions[0].shape:
        raise InvalidShape(f"M has shape {M.shape}, expected {partitions[0].shape}")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    return run_alternating(partitions, M, lam, eps0=eps0, max_iter=max_iter, F0=M,
                           retain_iterates=retain_iterates)
