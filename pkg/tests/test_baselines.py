import numpy as np
import pytest

from lfmvc.baselines import a_mkkm, kernel_kmeans, mkkm, mkkm_weights, residuals, sb_kkm
from lfmvc.errors import DegenerateResidual
from lfmvc.metrics import accuracy
from lfmvc.synth import make_synthetic
from lfmvc.kernels import KernelSpec, compute_kernel, preprocess

from conftest import random_kernels
from oracles import simplex_grid_min


def test_a_mkkm_single_kernel_equals_kernel_kmeans(rng):
    (K,) = random_kernels(rng, 40, 1)
    l1, H1 = a_mkkm([K], 3, restarts=3, seed=7)
    l2, H2 = kernel_kmeans(K, 3, restarts=3, seed=7)
    assert np.array_equal(l1, l2)
    assert np.allclose(H1, H2)


def test_a_mkkm_identical_kernels(rng):
    (K,) = random_kernels(rng, 40, 1)
    l1, _ = a_mkkm([K, K, K], 3, seed=2)
    l2, _ = kernel_kmeans(K, 3, seed=2)
    assert np.array_equal(l1, l2)


def test_sb_kkm_prefers_informative_view():
    views, truth = make_synthetic(n=150, k=3, m=1, noise_view=True, seed=3)
    kernels = [preprocess(compute_kernel(X, KernelSpec("linear"))) for X in views]
    out = sb_kkm(kernels, 3, truth, restarts=5)
    assert out["best"] == 0
    assert out["views"][0]["acc"] > out["views"][1]["acc"]


def test_sb_kkm_tie_goes_to_lowest_index(rng):
    (K,) = random_kernels(rng, 30, 1)
    truth = np.arange(30) % 3
    assert sb_kkm([K, K, K], 3, truth)["best"] == 0


@pytest.mark.parametrize("a, expected", [((1.0, 1.0), (0.5, 0.5)), ((1.0, 3.0), (0.75, 0.25))])
def test_mkkm_weights_examples(a, expected):
    beta = mkkm_weights(a)
    assert np.allclose(beta, expected)
    assert np.sum(beta ** 2 * np.array(a)) == pytest.approx(simplex_grid_min(a), abs=1e-6)


def test_mkkm_weights_match_simplex_grid(rng):
    for _ in range(20):
        a = rng.uniform(0.1, 5, size=int(rng.integers(2, 4)))
        beta = mkkm_weights(a)
        assert beta.sum() == pytest.approx(1.0) and np.all(beta >= 0)
        val = float(np.sum(beta ** 2 * a))
        assert val <= simplex_grid_min(a) + 1e-12
        assert val == pytest.approx(simplex_grid_min(a), abs=1e-5)


def test_mkkm_weights_degenerate():
    with pytest.raises(DegenerateResidual):
        mkkm_weights([0.0, 1.0])


def test_residuals_nonnegative(rng):
    kernels = random_kernels(rng, 30, 3)
    H = np.linalg.qr(rng.standard_normal((30, 3)))[0]
    assert np.all(residuals(kernels, H) >= -1e-10)


def test_mkkm_trace_monotone_and_simplex(rng):
    kernels = random_kernels(rng, 60, 4)
    state = mkkm(kernels, 3)
    trace = np.array(state.objective_trace)
    assert np.all(np.diff(trace) <= 1e-9 * np.maximum(1, np.abs(trace[:-1])))
    assert state.beta.sum() == pytest.approx(1.0)
    assert np.all(state.beta >= 0)
    assert len(trace) == state.iterations + 1


def test_mkkm_identical_kernels_uniform(rng):
    (K,) = random_kernels(rng, 40, 1)
    state = mkkm([K, K, K], 3)
    assert np.allclose(state.beta, 1 / 3)
    assert state.converged


def test_mkkm_clusters_blobs(blobs):
    kernels, truth = blobs
    state = mkkm(kernels, 3)
    from lfmvc.partition import lloyd_round

    labels, _ = lloyd_round(state.H, 3, restarts=5)
    assert accuracy(labels, truth) > 0.5
