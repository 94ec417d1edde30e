"""Timing harnesses: per-iteration scaling in n, and numba vs numpy kernels."""
import time

import numpy as np

from . import _accel
from .fusion_global import sweep


def random_orthonormal(rng, n, k):
    Q, R = np.linalg.qr(rng.standard_normal((n, k)))
    return Q * np.sign(np.diag(R))


def _best_time(fn, min_block=0.05, blocks=5):
    """Seconds per call: calls are batched into blocks of at least ``min_block``
    seconds and the fastest block wins."""
    fn()
    reps = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_block:
            break
        reps *= 2
    best = dt / reps
    for _ in range(blocks - 1):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def iteration_time(n, m=3, k=5, lam=1.0, local=True, seed=0, min_block=0.05, blocks=5):
    """Seconds for one F -> W -> beta sweep on random inputs of size ``n``."""
    rng = np.random.default_rng(seed)
    weighted = [random_orthonormal(rng, n, k) for _ in range(m)]
    R = random_orthonormal(rng, n, k)
    if local:
        weighted = [rng.integers(1, n, size=n)[:, None] * H for H in weighted]
        R = rng.integers(1, n, size=n)[:, None] * R
    reg = lam * R
    rotations = [np.eye(k)] * m
    beta = np.full(m, 1.0 / np.sqrt(m))
    return _best_time(lambda: sweep(weighted, reg, rotations, beta), min_block, blocks)


def linear_fit(x, y):
    """Least-squares line; returns ``(slope, intercept, r_squared)``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def scaling_sweep(ns=(500, 1000, 2000, 4000), m=3, k=5, local=True, seed=0, min_block=0.05, blocks=5):
    times = [iteration_time(n, m, k, local=local, seed=seed, min_block=min_block, blocks=blocks) for n in ns]
    slope, intercept, r2 = linear_fit(ns, times)
    return {"n": list(ns), "seconds_per_iteration": times, "slope": slope,
            "intercept": intercept, "r_squared": r2, "m": m, "k": k, "local": local}


def compare_backends(n=2000, k=5, d=5, seed=0, min_block=0.05, blocks=3):
    """Time each accelerated kernel on both code paths; results must agree."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    C = rng.standard_normal((k, d))
    labels = rng.integers(0, k, size=n)
    Kn = min(n, 1000)
    K = rng.standard_normal((Kn, Kn))
    K = K + K.T
    tau = max(1, Kn // 2)
    truth = rng.integers(0, k, size=n)
    cases = {
        "nearest_center": ((X, C), _accel.nearest_center_numpy, _accel.nearest_center_numba),
        "center_sums": ((X, labels, k), _accel.center_sums_numpy, _accel.center_sums_numba),
        "neighbor_counts": ((K, tau), _accel.neighbor_counts_numpy, _accel.neighbor_counts_numba),
        "contingency": ((labels, truth, k, k), _accel.contingency_numpy, _accel.contingency_numba),
    }
    out = {}
    for name, (args, f_np, f_nb) in cases.items():
        r_np, r_nb = f_np(*args), f_nb(*args)
        pairs = zip(r_np, r_nb) if isinstance(r_np, tuple) else [(r_np, r_nb)]
        agree = all(np.allclose(a, b) for a, b in pairs)
        t_np = _best_time(lambda: f_np(*args), min_block, blocks)
        t_nb = _best_time(lambda: f_nb(*args), min_block, blocks)
        out[name] = {"numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb if t_nb > 0 else float("inf"),
                     "agree": bool(agree)}
    return {"numba_available": _accel.HAS_NUMBA, "active_backend": _accel.backend(), "kernels": out}
