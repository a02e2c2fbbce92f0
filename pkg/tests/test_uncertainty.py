import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbreliability.uncertainty import (
    all_uncertainties,
    ensemble_uncertainties,
    entropy_uncertainty,
    max_prob_uncertainty,
)


def H(*p):
    """Scalar entropy, written out independently of the library."""
    return -sum(x * math.log(x) for x in p if x > 0)


@pytest.mark.parametrize("post, expected", [
    ([1.0, 0.0], 0.0),
    ([0.7, 0.3], 0.3),
    ([0.25] * 4, 0.75),
])
def test_max_prob(post, expected):
    assert max_prob_uncertainty(post) == pytest.approx(expected)


def test_entropy_values():
    assert entropy_uncertainty([1.0, 0.0]) == 0.0
    assert entropy_uncertainty([0.5, 0.5]) == pytest.approx(math.log(2))
    assert H(0.9, 0.1) == pytest.approx(0.325083, abs=1e-6)
    assert entropy_uncertainty([0.9, 0.1]) == pytest.approx(0.325083, abs=1e-6)


def test_identical_members():
    member = [0.6, 0.3, 0.1]
    u_t, u_a, u_e = ensemble_uncertainties([member] * 5)
    assert u_e == 0
    assert u_t == pytest.approx(H(*member))
    assert u_a == pytest.approx(H(*member))


def test_maximal_disagreement():
    u_t, u_a, u_e = ensemble_uncertainties([[1.0, 0.0], [0.0, 1.0]])
    assert u_t == pytest.approx(math.log(2))
    assert u_a == 0
    assert u_e == pytest.approx(math.log(2))


def test_two_member_decomposition():
    u_t, u_a, u_e = ensemble_uncertainties([[0.8, 0.2], [0.6, 0.4]])
    assert H(0.7, 0.3) == pytest.approx(0.610864, abs=1e-6)
    assert H(0.8, 0.2) == pytest.approx(0.500402, abs=1e-6)
    assert H(0.6, 0.4) == pytest.approx(0.673012, abs=1e-6)
    assert u_t == pytest.approx(0.610864, abs=1e-6)
    assert u_a == pytest.approx(0.586707, abs=1e-6)
    assert u_e == pytest.approx(0.024157, abs=1e-6)


def test_mismatched_class_counts():
    with pytest.raises(ValueError):
        ensemble_uncertainties([[0.5, 0.5], [0.2, 0.3, 0.5]])


def test_single_member_rejected():
    with pytest.raises(ValueError):
        ensemble_uncertainties([[0.5, 0.5]])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 30), st.integers(2, 6))
def test_epistemic_nonnegative_and_additive(seed, members, classes):
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.full(classes, 0.3), size=(members, 10))
    u_t, u_a, u_e = ensemble_uncertainties(probs)
    assert (u_e >= 0).all()
    np.testing.assert_allclose(u_t, u_a + u_e, atol=1e-9)


def test_binary_entropy_and_max_prob_rank_alike(rng):
    p = rng.uniform(size=500)
    post = np.column_stack([p, 1 - p])
    a = np.argsort(entropy_uncertainty(post), kind="stable")
    b = np.argsort(max_prob_uncertainty(post), kind="stable")
    np.testing.assert_array_equal(a, b)


def test_relabeling_invariance(rng):
    model_p = rng.dirichlet(np.ones(4), size=20)
    members = rng.dirichlet(np.ones(4), size=(5, 20))
    perm = rng.permutation(4)
    a = all_uncertainties(model_p, members)
    b = all_uncertainties(model_p[:, perm], members[:, :, perm])
    for k in a:
        np.testing.assert_allclose(a[k], b[k], atol=1e-12)


def test_ranges(rng):
    post = rng.dirichlet(np.ones(3), size=100)
    assert (max_prob_uncertainty(post) <= 1 - 1 / 3 + 1e-12).all()
    assert (entropy_uncertainty(post) <= math.log(3) + 1e-12).all()
