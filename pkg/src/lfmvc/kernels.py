"""Kernel construction, validation and preprocessing."""
from dataclasses import dataclass
import math

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    AsymmetricInput,
    DegenerateDiagonal,
    InvalidInput,
    InvalidShape,
    InvalidSpec,
)

KINDS = ("linear", "polynomial", "gaussian", "laplace", "sigmoid")

ASYMMETRY_TOL = 1e-6
DIAG_EPS = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Kernel function choice and its parameters.

    Only the parameters relevant to ``kind`` are checked: ``degree`` for
    polynomial, ``sigma`` for gaussian/laplace, ``gamma``/``theta`` for
    sigmoid.
    """

    kind: str = "linear"
    degree: int = 2
    sigma: float = 1.0
    gamma: float = 1.0
    theta: float = -1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "polynomial" and (int(self.degree) != self.degree or self.degree < 1):
            raise InvalidSpec(f"polynomial degree must be an integer >= 1, got {self.degree}")
        if self.kind in ("gaussian", "laplace") and not self.sigma > 0:
            raise InvalidSpec(f"sigma must be > 0, got {self.sigma}")
        if self.kind == "sigmoid":
            if not self.gamma > 0:
                raise InvalidSpec(f"gamma must be > 0, got {self.gamma}")
            if not self.theta < 0:
                raise InvalidSpec(f"theta must be < 0, got {self.theta}")

    @classmethod
    def from_dict(cls, d):
        known = {"kind", "degree", "sigma", "gamma", "theta"}
        extra = set(d) - known
        if extra:
            raise InvalidSpec(f"unknown kernel spec keys: {sorted(extra)}")
        return cls(**d)

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind == "polynomial":
            out["degree"] = self.degree
        elif self.kind in ("gaussian", "laplace"):
            out["sigma"] = self.sigma
        elif self.kind == "sigmoid":
            out["gamma"] = self.gamma
            out["theta"] = self.theta
        return out


def _as_features(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidShape(f"feature view must be 2-D, got shape {X.shape}")
    if X.shape[0] < 2 or X.shape[1] < 1:
        raise InvalidShape(f"feature view needs n >= 2 and d >= 1, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("feature view contains non-finite entries")
    return X


def compute_kernel(X, spec=None):
    """Kernel matrix of the rows of ``X`` under ``spec`` (linear if omitted)."""
    spec = spec or KernelSpec()
    X = _as_features(X)
    kind = spec.kind
    if kind in ("linear", "polynomial", "sigmoid"):
        G = X @ X.T
        if kind == "polynomial":
            G = G ** int(spec.degree)
        elif kind == "sigmoid":
            G = np.tanh(spec.gamma * G + spec.theta)
    elif kind == "gaussian":
        G = np.exp(-cdist(X, X, "sqeuclidean") / (2.0 * spec.sigma ** 2))
    else:
        G = np.exp(-cdist(X, X, "euclidean") / spec.sigma)
    # every formula is symmetric; enforce it bitwise against BLAS rounding
    return np.triu(G) + np.triu(G, 1).T


def _as_square(K):
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidShape(f"kernel must be square, got shape {K.shape}")
    if not np.all(np.isfinite(K)):
        raise InvalidInput("kernel contains non-finite entries")
    return K


def validate_and_symmetrize(raw, tol=ASYMMETRY_TOL):
    """Return ``(raw + raw.T) / 2`` after checking the asymmetry is rounding-sized.

    The asymmetry is measured relative to ``max|raw|``.
    """
    K = _as_square(raw)
    scale = float(np.max(np.abs(K))) if K.size else 0.0
    asym = float(np.max(np.abs(K - K.T))) if K.size else 0.0
    if scale > 0 and asym / scale > tol:
        raise AsymmetricInput(f"max asymmetry {asym:.3g} exceeds {tol:g} relative to max|K|={scale:.3g}")
    return 0.5 * (K + K.T)


def asymmetry(K):
    K = np.asarray(K, dtype=np.float64)
    scale = float(np.max(np.abs(K)))
    return float(np.max(np.abs(K - K.T))) / scale if scale > 0 else 0.0


def center_kernel(K):
    """Double-center: ``C K C`` with ``C = I - 11^T / n``."""
    K = _as_square(K)
    row = K.mean(axis=1, keepdims=True)
    col = K.mean(axis=0, keepdims=True)
    Kc = K - row - col + K.mean()
    return 0.5 * (Kc + Kc.T)


def normalize_kernel(K, eps=DIAG_EPS):
    """Cosine-normalize so the diagonal is all ones."""
    K = _as_square(K)
    d = np.diag(K).copy()
    bad = np.flatnonzero(d <= eps)
    if bad.size:
        raise DegenerateDiagonal(
            f"diagonal entry K[{bad[0]},{bad[0]}]={d[bad[0]]:.3g} <= {eps:g}; "
            "duplicate or zero sample after centering?"
        )
    s = 1.0 / np.sqrt(d)
    out = K * s[:, None] * s[None, :]
    np.fill_diagonal(out, 1.0)
    return 0.5 * (out + out.T)


def preprocess(K):
    return normalize_kernel(center_kernel(K))


def average_kernel(kernels):
    kernels = list(kernels)
    if not kernels:
        raise InvalidInput("need at least one kernel")
    return sum(np.asarray(K, dtype=np.float64) for K in kernels) / len(kernels)


def median_sigma(X):
    """Median pairwise distance, a common data-driven Gaussian bandwidth."""
    X = _as_features(X)
    d = cdist(X, X)
    iu = np.triu_indices(X.shape[0], 1)
    med = float(np.median(d[iu]))
    return med if med > 0 and math.isfinite(med) else 1.0
