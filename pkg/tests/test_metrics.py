import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lfmvc.errors import InvalidInput
from lfmvc.metrics import accuracy, contingency_table, nmi, purity

from oracles import brute_force_accuracy, nmi_reference, purity_reference

TRUTH9 = [0, 0, 0, 1, 1, 1, 2, 2, 2]
PRED9 = [1, 1, 1, 2, 2, 0, 0, 0, 2]


def test_accuracy_identity_and_relabel():
    assert accuracy(TRUTH9, TRUTH9) == 1.0
    relabel = {0: 2, 1: 0, 2: 1}
    assert accuracy([relabel[t] for t in TRUTH9], TRUTH9) == 1.0


def test_accuracy_hand_case():
    assert brute_force_accuracy(PRED9, TRUTH9) == pytest.approx(7 / 9)
    assert accuracy(PRED9, TRUTH9) == pytest.approx(7 / 9)


def test_accuracy_unequal_cluster_counts():
    truth = [0, 0, 1, 1, 2, 2]
    pred = [0, 0, 0, 0, 1, 1]
    assert accuracy(pred, truth) == pytest.approx(brute_force_accuracy(pred, truth)) == pytest.approx(4 / 6)
    pred = [0, 1, 2, 3, 4, 5]
    assert accuracy(pred, truth) == pytest.approx(3 / 6)


def test_length_mismatch():
    for fn in (accuracy, nmi, purity):
        with pytest.raises(InvalidInput):
            fn([0, 1], [0, 1, 1])


def test_nmi_cases():
    assert nmi([0, 0, 1, 1, 2, 2], [0, 0, 1, 1, 2, 2]) == pytest.approx(1.0)
    assert nmi([0, 0, 0, 0], [0, 0, 1, 1]) == 0.0
    assert nmi([0, 0, 0, 0, 1, 1, 1, 1], [0, 0, 1, 1, 0, 0, 1, 1]) == pytest.approx(0.0, abs=1e-15)
    assert nmi([0, 0, 0], [5, 5, 5]) == 1.0


def test_purity_cases():
    assert purity(TRUTH9, TRUTH9) == 1.0
    assert purity([0] * 9, TRUTH9) == pytest.approx(1 / 3)
    pred = [0, 0, 0, 0, 1, 1, 1, 2, 2, 2]
    truth = [0, 0, 0, 1, 1, 1, 2, 2, 2, 0]
    assert purity_reference(pred, truth) == pytest.approx(0.7)
    assert purity(pred, truth) == pytest.approx(0.7)


def test_contingency_sums_to_n(rng):
    a = rng.integers(0, 5, 40)
    b = rng.integers(0, 3, 40)
    assert contingency_table(a, b).sum() == 40


def test_hungarian_matches_brute_force(rng):
    for _ in range(200):
        k = int(rng.integers(1, 7))
        n = int(rng.integers(1, 30))
        truth = rng.integers(0, k, n).tolist()
        pred = rng.integers(0, int(rng.integers(1, 7)), n).tolist()
        assert accuracy(pred, truth) == pytest.approx(brute_force_accuracy(pred, truth), abs=1e-12)


labels = st.lists(st.integers(0, 4), min_size=1, max_size=40)


@settings(max_examples=150, deadline=None)
@given(data=st.data(), n=st.integers(1, 40))
def test_metrics_against_references_and_invariances(data, n):
    pred = data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    truth = data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    perm_p = data.draw(st.permutations(range(5)))
    perm_t = data.draw(st.permutations(range(5)))
    pred2 = [perm_p[v] for v in pred]
    truth2 = [perm_t[v] for v in truth]
    v_nmi = nmi(pred, truth)
    assert v_nmi == pytest.approx(nmi_reference(pred, truth), abs=1e-12)
    assert 0.0 <= v_nmi <= 1.0
    assert nmi(pred2, truth2) == pytest.approx(v_nmi, abs=1e-12)
    assert purity(pred, truth) == pytest.approx(purity_reference(pred, truth))
    assert purity(pred2, truth2) == pytest.approx(purity(pred, truth))
    assert purity(pred, truth) >= 1 / len(set(truth)) - 1e-12
    assert accuracy(pred2, truth2) == pytest.approx(accuracy(pred, truth))
