"""Numerical checks of the trace inequalities and bounds behind the solvers."""
from dataclasses import dataclass
import csv
import math

import numpy as np

from .errors import InvalidDelta, InvalidShape, MissingTrace
from .fusion_global import combine, procrustes

SLACK = 1e-8


def _slack(*values):
    return SLACK * max(1.0, *(abs(v) for v in values))


def lemma1_check(P):
    """``Tr(P)^2 <= k Tr(P^T P)`` for square ``P``."""
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidShape(f"P must be square, got {P.shape}")
    k = P.shape[0]
    lhs = float(np.trace(P)) ** 2
    rhs = k * float(np.sum(P * P))
    return lhs, rhs, lhs <= rhs + 1e-9 * max(1.0, rhs)


def lemma2_check(partitions, rotations, beta):
    """``Tr(B B^T) <= m^2 k`` for ``B = sum_p beta_p H_p W_p``."""
    B = combine(partitions, rotations, beta)
    m = len(partitions)
    k = B.shape[1]
    value = float(np.sum(B * B))
    bound = float(m * m * k)
    return value, bound, value <= bound + _slack(bound)


def theorem4_bound(m, k, lam):
    """Upper bound ``(k/2)(m^2+1) + lambda k`` on the global objective."""
    if m < 1 or k < 1 or lam < 0:
        raise ValueError("need m, k >= 1 and lambda >= 0")
    return 0.5 * k * (m * m + 1) + lam * k


def local_bound(m, k, lam, per_view_counts, average_counts):
    """Count-scaled analogue of :func:`theorem4_bound` for the local objective."""
    cmax = max(int(np.max(c)) for c in per_view_counts)
    return 0.5 * k * (m * m + 1) * cmax + lam * k * int(np.max(average_counts))


def generalization_bound(n, m, k, delta):
    """``sqrt(pi/2) k / sqrt(n) + 8 m sqrt(ln(1/delta) / (2n))``."""
    if not 0 < delta < 1:
        raise InvalidDelta(f"delta must lie in (0, 1), got {delta}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.sqrt(math.pi / 2) * k / math.sqrt(n) + 8 * m * math.sqrt(math.log(1 / delta) / (2 * n))


def theorem3_check(U):
    """At the Procrustes solution ``F = S V^T`` of ``U = S diag(s) V^T``,
    ``Q = V^T F^T S`` is orthogonal, ``Tr(Q diag(s)) = sum(s)`` and ``s >= 0``.

    Returns ``(singular_values, trace_value, holds)``.
    """
    U = np.asarray(U, dtype=np.float64)
    S, s, Vt = np.linalg.svd(U, full_matrices=False)
    F = procrustes(U)[0]
    Q = Vt @ F.T @ S
    tr = float(np.trace(Q @ np.diag(s)))
    holds = bool(np.all(s >= -1e-10) and abs(tr - s.sum()) <= _slack(s.sum()))
    return s, tr, holds


@dataclass
class GapTrace:
    obj1: np.ndarray
    obj2: np.ndarray
    obj3: np.ndarray

    def __len__(self):
        return len(self.obj1)

    def violations(self, slack=SLACK):
        a = self.obj1 > self.obj2 + slack * np.maximum(1.0, np.abs(self.obj2))
        b = self.obj2 > self.obj3 + slack * np.maximum(1.0, np.abs(self.obj3))
        return np.flatnonzero(a | b)

    @property
    def relative_gap(self):
        return (self.obj2 - self.obj1) / np.maximum(np.abs(self.obj2), np.finfo(float).tiny)

    def rows(self):
        return [(i, float(a), float(b), float(c)) for i, (a, b, c) in enumerate(zip(self.obj1, self.obj2, self.obj3))]


def gap_terms(F, partitions, rotations, beta):
    B = combine(partitions, rotations, beta)
    m = len(partitions)
    k = B.shape[1]
    FB = F.T @ B
    tbb = float(np.sum(B * B))
    t2 = float(np.trace(FB)) ** 2 / k
    return tbb - float(np.sum(FB * FB)), tbb - t2, m * m * k - t2


def gap_trace(run, partitions, M=None, lam=None, check=True):
    """Per-iteration ``obj1 <= obj2 <= obj3`` from a run with retained iterates.

    ``obj1 = Tr(BB^T) - Tr(F^T B B^T F)``, ``obj2 = Tr(BB^T) - Tr(F^T B)^2 / k``
    and ``obj3 = m^2 k - Tr(F^T B)^2 / k``, evaluated with the unweighted
    ``B = sum_p beta_p H_p W_p`` of each iterate. ``M`` and ``lam`` are
    accepted for call-site symmetry; the chain does not involve them.
    """
    if not run.iterates:
        raise MissingTrace("run was made without retain_iterates=True")
    rows = np.array([gap_terms(F, partitions, W, b) for F, W, b in run.iterates])
    gt = GapTrace(rows[:, 0], rows[:, 1], rows[:, 2])
    if check:
        bad = gt.violations()
        if bad.size:
            raise AssertionError(f"gap chain violated at iterations {bad.tolist()}")
    return gt


def write_trace_csv(path, run, gap=None):
    """Write ``iteration, objective, obj1, obj2, obj3`` rows (obj columns empty without ``gap``)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "objective", "obj1", "obj2", "obj3"])
        for i, obj in enumerate(run.objective_trace):
            if gap is not None:
                w.writerow([i, repr(obj), repr(float(gap.obj1[i])), repr(float(gap.obj2[i])), repr(float(gap.obj3[i]))])
            else:
                w.writerow([i, repr(obj), "", "", ""])
