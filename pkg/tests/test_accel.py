import os
import subprocess
import sys

import numpy as np
import pytest

from lfmvc import _accel

pytestmark = pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")


def test_nearest_center_paths_agree(rng):
    X = rng.standard_normal((200, 4))
    C = rng.standard_normal((6, 4))
    l1, d1 = _accel.nearest_center_numpy(X, C)
    l2, d2 = _accel.nearest_center_numba(X, C)
    assert np.array_equal(l1, l2)
    assert np.allclose(d1, d2, rtol=1e-12, atol=1e-14)


def test_nearest_center_ties_pick_lowest_index():
    X = np.zeros((3, 2))
    C = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    for fn in (_accel.nearest_center_numpy, _accel.nearest_center_numba):
        assert fn(X, C)[0].tolist() == [0, 0, 0]


def test_center_sums_paths_agree(rng):
    X = rng.standard_normal((100, 3))
    labels = rng.integers(0, 5, size=100)
    s1, c1 = _accel.center_sums_numpy(X, labels, 6)
    s2, c2 = _accel.center_sums_numba(X, labels, 6)
    assert np.array_equal(c1, c2) and c1[5] == 0
    assert np.allclose(s1, s2, atol=1e-12)


@pytest.mark.parametrize("tau", [1, 2, 7, 30])
def test_neighbor_counts_paths_agree(rng, tau):
    K = np.round(rng.standard_normal((30, 30)), 1)
    K = K + K.T
    assert np.array_equal(_accel.neighbor_counts_numpy(K, tau), _accel.neighbor_counts_numba(K, tau))


def test_contingency_paths_agree(rng):
    a = rng.integers(0, 4, size=50)
    b = rng.integers(0, 3, size=50)
    assert np.array_equal(_accel.contingency_numpy(a, b, 4, 3), _accel.contingency_numba(a, b, 4, 3))


def test_env_flag_selects_numpy_path():
    code = "from lfmvc import _accel; print(_accel.backend())"
    env = dict(os.environ, LFMVC_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["LFMVC_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"


def test_numpy_fallback_pipeline_matches(rng, monkeypatch):
    from lfmvc.partition import lloyd_round, neighbor_aggregate

    P = rng.standard_normal((80, 3))
    K = rng.standard_normal((40, 40))
    K = K + K.T
    monkeypatch.setattr(_accel, "USE_NUMBA", True)
    a = lloyd_round(P, 3, restarts=3, seed=5)
    ca = neighbor_aggregate(K, 6).counts
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    b = lloyd_round(P, 3, restarts=3, seed=5)
    cb = neighbor_aggregate(K, 6).counts
    assert np.array_equal(a[0], b[0])
    assert a[1] == pytest.approx(b[1], rel=1e-12)
    assert np.array_equal(ca, cb)
