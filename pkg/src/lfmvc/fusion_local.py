"""Late-fusion alignment maximisation with tau-nearest-neighbour local alignment.

Each sample's neighbourhood selector is a 0/1 diagonal matrix, so summing the
per-sample local terms collapses to a single diagonal weighting ``D_p`` whose
entries are neighbourhood membership counts. The local objective is

    sum_p beta_p Tr(F^T D_p H_p W_p) + lambda Tr(F^T D M)

with ``D`` built from the averaged kernel.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidShape, InvalidTau
from .fusion_global import (
    EPS0,
    MAX_ITER,
    _check_partitions,
    alignment_scores,
    polar_rotation,
    procrustes,
    run_alternating,
    update_beta,
)
from .kernels import average_kernel
from .partition import (
    base_partitions,
    lloyd_round,
    neighbor_aggregate,
    regularizer_partition,
    tau_from_fraction,
)

TAU_FRACTION = 0.5
TAU_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))


@dataclass(frozen=True)
class LocalFusionConfig:
    lam: float = 1.0
    tau_fraction: float = TAU_FRACTION
    eps0: float = EPS0
    max_iter: int = MAX_ITER
    restarts: int = 1
    seed: int = 0
    row_normalize: bool = True
    retain_iterates: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if not 0 < self.tau_fraction <= 1:
            raise InvalidTau(f"tau_fraction must lie in (0, 1], got {self.tau_fraction}")
        if not self.eps0 > 0:
            raise ValueError(f"eps0 must be > 0, got {self.eps0}")
        if self.max_iter < 1 or self.restarts < 1:
            raise ValueError("max_iter and restarts must be >= 1")


@dataclass(frozen=True)
class LocalAggregates:
    per_view: list
    average_view: object
    M_tilde: np.ndarray

    @property
    def tau(self):
        return self.average_view.tau


def build_local_aggregates(kernels, M, tau):
    kernels = [np.asarray(K, dtype=np.float64) for K in kernels]
    per_view = [neighbor_aggregate(K, tau, view_id=p) for p, K in enumerate(kernels)]
    avg = neighbor_aggregate(average_kernel(kernels), tau, view_id="average")
    M = np.asarray(M, dtype=np.float64)
    return LocalAggregates(per_view=per_view, average_view=avg, M_tilde=avg.counts[:, None] * M)


def _weighted(partitions, aggregates):
    partitions = _check_partitions(partitions)
    if len(aggregates.per_view) != len(partitions):
        raise InvalidShape(f"{len(aggregates.per_view)} aggregates for {len(partitions)} partitions")
    out = []
    for H, agg in zip(partitions, aggregates.per_view):
        if agg.n != H.shape[0]:
            raise InvalidShape(f"aggregate over {agg.n} samples, partition has {H.shape[0]} rows")
        out.append(agg.counts[:, None] * H)
    return out


def lam_objective(F, partitions, rotations, beta, aggregates, lam):
    G = _weighted(partitions, aggregates)
    F = np.asarray(F, dtype=np.float64)
    return float(np.asarray(beta) @ alignment_scores(F, G, rotations) + lam * np.sum(F * aggregates.M_tilde))


def update_F_local(partitions, rotations, beta, aggregates, lam, strict=False):
    U = lam * aggregates.M_tilde
    for G, W, b in zip(_weighted(partitions, aggregates), rotations, beta):
        U = U + b * (G @ W)
    return procrustes(U, strict=strict)[0]


def update_W_local(H_p, F, beta_p, counts_p):
    L = np.asarray(H_p).T @ (np.asarray(counts_p)[:, None] * np.asarray(F))
    return polar_rotation(L)


def update_beta_local(partitions, rotations, F, aggregates):
    return update_beta(alignment_scores(np.asarray(F), _weighted(partitions, aggregates), rotations))


def solve_local(partitions, M, aggregates, lam=1.0, eps0=EPS0, max_iter=MAX_ITER, retain_iterates=False):
    """Run the local alternating solver on precomputed partitions and aggregates."""
    M = np.asarray(M, dtype=np.float64)
    G = _weighted(partitions, aggregates)
    res = run_alternating(G, aggregates.M_tilde, lam, eps0=eps0, max_iter=max_iter, F0=M,
                          retain_iterates=retain_iterates)
    res.extra["tau"] = aggregates.tau
    return res


def lf_mvc_lam(kernels, k, config=None):
    """Full local pipeline: base partitions, aggregates, solver, Lloyd rounding."""
    config = config or LocalFusionConfig()
    kernels = [np.asarray(K, dtype=np.float64) for K in kernels]
    n = kernels[0].shape[0]
    partitions = base_partitions(kernels, k)
    M = regularizer_partition(kernels, k)
    tau = tau_from_fraction(config.tau_fraction, n)
    aggregates = build_local_aggregates(kernels, M, tau)
    res = solve_local(partitions, M, aggregates, lam=config.lam, eps0=config.eps0,
                      max_iter=config.max_iter, retain_iterates=config.retain_iterates)
    res.labels, res.inertia = lloyd_round(res.F, k, restarts=config.restarts, seed=config.seed,
                                          row_normalize=config.row_normalize)
    return res
