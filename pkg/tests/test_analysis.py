import math

import numpy as np
import pytest

from lfmvc.analysis import (
    gap_trace,
    generalization_bound,
    lemma1_check,
    lemma2_check,
    local_bound,
    theorem3_check,
    theorem4_bound,
    write_trace_csv,
)
from lfmvc.errors import InvalidDelta, InvalidShape, MissingTrace
from lfmvc.fusion_global import lf_mvc_gam
from lfmvc.fusion_local import build_local_aggregates, solve_local
from lfmvc.partition import base_partitions, regularizer_partition

from conftest import random_kernels, random_orthonormal, random_rotation
from oracles import sphere_samples


def test_lemma1_examples():
    lhs, rhs, ok = lemma1_check(np.eye(4))
    assert (lhs, rhs, ok) == (16.0, 16.0, True)
    lhs, rhs, ok = lemma1_check(np.diag([1.0, 0.0]))
    assert (lhs, rhs) == (1.0, 2.0) and ok
    with pytest.raises(InvalidShape):
        lemma1_check(np.ones((2, 3)))


def test_lemma1_fuzz(rng):
    for _ in range(500):
        k = int(rng.integers(1, 8))
        assert lemma1_check(rng.standard_normal((k, k)) * 10 ** rng.uniform(-3, 3))[2]


def test_lemma2_examples(rng):
    H = random_orthonormal(rng, 10, 3)
    value, bound, ok = lemma2_check([H], [np.eye(3)], [1.0])
    assert value == pytest.approx(3.0) and bound == 3.0 and ok
    value, bound, ok = lemma2_check([H] * 4, [np.eye(3)] * 4, [1.0] * 4)
    assert value == pytest.approx(48.0) and bound == 48.0 and ok


def test_lemma2_fuzz(rng):
    for _ in range(200):
        m, k = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        Hs = [random_orthonormal(rng, 12, k) for _ in range(m)]
        Ws = [random_rotation(rng, k) for _ in range(m)]
        assert lemma2_check(Hs, Ws, sphere_samples(rng, m, 1)[0])[2]


def test_theorem4_bound_values():
    assert theorem4_bound(1, 2, 0) == 2
    assert theorem4_bound(3, 5, 1) == 30
    with pytest.raises(ValueError):
        theorem4_bound(0, 2, 0)


def test_local_bound_reduces_to_global_for_unit_counts():
    ones = np.ones(5)
    assert local_bound(2, 3, 0.5, [ones, ones], ones) == theorem4_bound(2, 3, 0.5)


def test_generalization_bound_value():
    assert generalization_bound(10000, 5, 10, 0.05) == pytest.approx(0.6148807798677133, rel=1e-12)


def test_generalization_bound_homogeneity_and_monotonicity():
    a = generalization_bound(1000, 3, 4, 0.1)
    assert generalization_bound(2000, 3, 4, 0.1) == pytest.approx(a / math.sqrt(2), rel=1e-12)
    assert generalization_bound(1000, 3, 4, 0.01) > a
    assert generalization_bound(1000, 4, 4, 0.1) > a
    assert generalization_bound(1000, 3, 5, 0.1) > a
    for bad in (0.0, 1.0, -0.5):
        with pytest.raises(InvalidDelta):
            generalization_bound(100, 2, 2, bad)


def test_theorem3_random(rng):
    for _ in range(100):
        n = int(rng.integers(3, 20))
        k = int(rng.integers(1, n + 1))
        s, tr, ok = theorem3_check(rng.standard_normal((n, k)))
        assert ok and tr == pytest.approx(s.sum())


def test_gap_requires_iterates(rng):
    Hs = [random_orthonormal(rng, 10, 2) for _ in range(2)]
    res = lf_mvc_gam(Hs, Hs[0], lam=1.0)
    with pytest.raises(MissingTrace):
        gap_trace(res, Hs)


def test_gap_chain_global_and_local(rng, tmp_path):
    kernels = random_kernels(rng, 40, 3)
    Hs = base_partitions(kernels, 3)
    M = regularizer_partition(kernels, 3)
    for lam in (0.0, 1.0, 8.0):
        res = lf_mvc_gam(Hs, M, lam, retain_iterates=True)
        gt = gap_trace(res, Hs)
        assert len(gt) == len(res.objective_trace)
        assert gt.violations().size == 0
    agg = build_local_aggregates(kernels, M, 8)
    res = solve_local(Hs, M, agg, lam=1.0, retain_iterates=True)
    gt = gap_trace(res, Hs)
    assert gt.violations().size == 0
    path = tmp_path / "trace.csv"
    write_trace_csv(path, res, gt)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,objective,obj1,obj2,obj3"
    assert len(lines) == res.iterations + 2
