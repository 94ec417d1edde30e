"""External clustering metrics: ACC, NMI, purity."""
import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _accel
from .errors import InvalidInput

NMI_CONVENTION = "sqrt"


def _encode(labels):
    labels = np.asarray(labels).ravel()
    _, codes = np.unique(labels, return_inverse=True)
    return codes.astype(np.int64)


def contingency_table(pred, truth):
    """Counts with predicted clusters on rows and true classes on columns.

    Labels are re-encoded to ``0..c-1`` in sorted order, so empty label
    values never produce empty rows or columns.
    """
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise InvalidInput(f"label vectors differ in length: {pred.size} vs {truth.size}")
    if pred.size == 0:
        raise InvalidInput("empty label vectors")
    p, t = _encode(pred), _encode(truth)
    return _accel.contingency(p, t, p.max() + 1, t.max() + 1)


def accuracy(pred, truth):
    C = contingency_table(pred, truth)
    size = max(C.shape)
    padded = np.zeros((size, size), dtype=C.dtype)
    padded[: C.shape[0], : C.shape[1]] = C
    rows, cols = linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, cols].sum()) / C.sum()


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth):
    """Mutual information over the geometric mean of the two entropies.

    Two single-cluster labellings score 1; a single-cluster labelling against
    a non-trivial one scores 0.
    """
    C = contingency_table(pred, truth).astype(np.float64)
    n = C.sum()
    hp = _entropy(C.sum(axis=1), n)
    ht = _entropy(C.sum(axis=0), n)
    if hp == 0.0 and ht == 0.0:
        return 1.0
    if hp == 0.0 or ht == 0.0:
        return 0.0
    nz = C > 0
    outer = np.outer(C.sum(axis=1), C.sum(axis=0))
    mi = float((C[nz] / n * np.log(C[nz] * n / outer[nz])).sum())
    return float(np.clip(mi / np.sqrt(hp * ht), 0.0, 1.0))


def purity(pred, truth):
    C = contingency_table(pred, truth)
    return float(C.max(axis=1).sum()) / C.sum()


def evaluate(pred, truth):
    return {"acc": accuracy(pred, truth), "nmi": nmi(pred, truth), "purity": purity(pred, truth)}
