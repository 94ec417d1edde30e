"""Deterministic multi-view Gaussian-blob fixtures."""
from pathlib import Path

import numpy as np

from .io import write_features, write_labels


def _rotation(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def _blob_view(rng, labels, k, d, separation, spread):
    centers = rng.standard_normal((k, d))
    centers *= separation / np.linalg.norm(centers, axis=1, keepdims=True)
    X = centers[labels] + spread * rng.standard_normal((labels.size, d))
    return X @ _rotation(rng, d)


def make_synthetic(n=300, k=3, m=3, noise_view=False, seed=0, separation=2.0, spread=1.0):
    """Views of ``k`` Gaussian blobs sharing one balanced labelling.

    Each view lives in its own dimension in ``[max(2, k + 1), 5]`` with its own
    blob centres and random rotation. The optional noise view has the same
    blob structure for a shuffled copy of the labels, so it clusters well
    but carries no information about the truth.

    Returns ``(views, labels)``.
    """
    if n < 2 * k:
        raise ValueError(f"need n >= 2k, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % k)
    lo = max(2, k + 1)
    hi = max(5, lo)
    views = []
    for _ in range(m):
        d = int(rng.integers(lo, hi + 1))
        views.append(_blob_view(rng, labels, k, d, separation, spread))
    if noise_view:
        d = int(rng.integers(lo, hi + 1))
        views.append(_blob_view(rng, rng.permutation(labels), k, d, separation, spread))
    return views, labels


def write_synthetic(out_dir, n=300, k=3, m=3, noise_view=False, seed=0, **kwargs):
    """Write ``view_<p>.csv`` feature files and ``labels.csv``; return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    views, labels = make_synthetic(n, k, m, noise_view, seed, **kwargs)
    paths = []
    for p, X in enumerate(views):
        path = out / f"view_{p}.csv"
        write_features(path, X)
        paths.append(path)
    label_path = out / "labels.csv"
    write_labels(label_path, labels)
    return paths, label_path
