import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbreliability.arc import arc, au_arc, auarc_of, ideal_order
from nbreliability.ranking import RankOrder


def test_hand_enumerated_curve():
    correct = [True, False, True, True]
    curve = arc([1, 0, 2, 3], correct)
    # retained sets: {0,1,2,3}, {0,2,3}, {2,3}, {3}
    np.testing.assert_allclose(curve.accuracies, [0.75, 1.0, 1.0, 1.0])
    assert au_arc(curve) == pytest.approx(0.9375)
    assert curve.auarc == pytest.approx(0.9375)


def test_accepts_rank_order():
    curve = arc(RankOrder.from_order([1, 0, 2, 3]), [True, False, True, True])
    assert au_arc(curve) == pytest.approx(0.9375)


@pytest.mark.parametrize("value", [True, False])
def test_constant_correctness(rng, value):
    order = rng.permutation(7)
    curve = arc(order, [value] * 7)
    np.testing.assert_array_equal(curve.accuracies, np.full(7, float(value)))


def test_errors():
    with pytest.raises(ValueError):
        arc([], [])
    with pytest.raises(ValueError):
        arc([0, 1], [True])
    from nbreliability.arc import AccuracyRejectionCurve
    with pytest.raises(ValueError):
        au_arc(AccuracyRejectionCurve(np.array([])))


def test_ideal_order():
    np.testing.assert_array_equal(ideal_order([True, False, True]).order, [1, 0, 2])
    np.testing.assert_array_equal(ideal_order([True] * 4).order, [0, 1, 2, 3])


def test_ideal_beats_random_permutations(rng):
    correct = rng.uniform(size=50) < 0.7
    best = auarc_of(ideal_order(correct), correct)
    for _ in range(1000):
        assert best >= auarc_of(rng.permutation(50), correct)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=40), st.integers(0, 2**32 - 1))
def test_curve_properties(correct, seed):
    rng = np.random.default_rng(seed)
    correct = np.array(correct)
    n = len(correct)
    order = rng.permutation(n)
    curve = arc(order, correct)
    acc = curve.accuracies
    assert acc[0] == pytest.approx(correct.mean())
    assert ((0 <= acc) & (acc <= 1)).all()
    assert acc[-1] in (0.0, 1.0)
    assert 0 <= au_arc(curve) <= 1
    assert au_arc(curve) <= auarc_of(ideal_order(correct), correct) + 1e-15
    # relabel instances jointly with the order
    perm = rng.permutation(n)
    inv = np.argsort(perm)
    np.testing.assert_allclose(arc(inv[order], correct[perm]).accuracies, acc)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.booleans(), min_size=2, max_size=30), st.integers(0, 2**32 - 1))
def test_swapping_wrong_forward_never_hurts(correct, seed):
    rng = np.random.default_rng(seed)
    correct = np.array(correct)
    order = rng.permutation(len(correct))
    for k in range(len(order) - 1):
        if correct[order[k]] and not correct[order[k + 1]]:
            swapped = order.copy()
            swapped[k], swapped[k + 1] = swapped[k + 1], swapped[k]
            assert auarc_of(swapped, correct) >= auarc_of(order, correct)
