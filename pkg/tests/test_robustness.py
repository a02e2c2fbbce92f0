import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_model, random_model
from nbreliability import nbc
from nbreliability.robustness import (
    eps_global,
    eps_local,
    global_robustness,
    local_predicate,
    local_robustness,
    oracle_eps_global,
    oracle_eps_local,
)

RES = 1e-4


def joint_model(top, runner_up, s):
    """Three classes, one binary feature with cond(f=0 | c) = s for every class.

    The joint scores at f=0 are ``top``, ``runner_up`` and ``s - top - runner_up``.
    """
    return make_model([top / s, runner_up / s, 1 - (top + runner_up) / s],
                      [[[s, 1 - s]] * 3])


def test_global_tie_is_zero():
    model = make_model([0.5, 0.5], [[[0.3, 0.7], [0.3, 0.7]]])
    assert eps_global(model, [0]) == 0.0
    assert oracle_eps_global(model, [0], RES) == 0.0


@pytest.mark.parametrize("top, second, s, expected", [
    (0.5, 0.3, 0.9, 0.166667),
    (0.9, 0.1, 1.0, 0.444444),
    (0.6, 0.2, 0.9, 0.285714),
])
def test_global_closed_form_against_oracle(top, second, s, expected):
    model = joint_model(top, second, s)
    p = [nbc.joint_score(model, c, [0]) for c in range(3)]
    np.testing.assert_allclose(sorted(p)[-2:], [second, top])
    oracle = oracle_eps_global(model, [0], RES)
    assert eps_global(model, [0]) == pytest.approx(expected, abs=1e-6)
    assert abs(oracle - eps_global(model, [0])) <= RES


def test_global_two_class():
    model = make_model([0.5, 0.5], [[[0.9, 0.1], [0.1, 0.9]]])
    # joints 0.45 and 0.05
    assert eps_global(model, [0]) == pytest.approx(0.4 / 1.4)


def test_global_limit_all_mass_on_prediction():
    model = make_model([1.0, 0.0], [[[1.0, 0.0], [0.5, 0.5]]])
    assert eps_global(model, [0]) == pytest.approx(0.5)
    assert abs(oracle_eps_global(model, [0], RES) - 0.5) <= RES


def test_local_quadratic_flip_point():
    model = make_model([0.5, 0.5], [[[0.8, 0.2], [0.2, 0.8]]])
    e = sympy.symbols("e")
    roots = sympy.solve(sympy.Eq((1 - e) ** 2 * sympy.Rational(2, 5),
                                 ((1 - e) / 2 + e) * ((1 - e) / 5 + e)), e)
    flip = [float(r) for r in roots if 0 < r < 1]
    assert len(flip) == 1
    assert eps_local(model, [0], 1e-10) == pytest.approx(flip[0], abs=1e-10)
    assert abs(oracle_eps_local(model, [0], RES) - flip[0]) <= RES


def test_local_tie_is_zero():
    model = make_model([0.5, 0.5], [[[0.3, 0.7], [0.3, 0.7]]])
    assert eps_local(model, [1]) == 0.0
    assert oracle_eps_local(model, [1], RES) == 0.0


def test_local_tolerances_agree(rng):
    for _ in range(50):
        model, f = random_model(rng)
        assert abs(eps_local(model, f, 1e-10) - eps_local(model, f, 1e-6)) <= 1e-6


def test_local_rejects_bad_tolerance():
    model = make_model([0.5, 0.5], [[[0.8, 0.2], [0.2, 0.8]]])
    with pytest.raises(ValueError):
        eps_local(model, [0], 0.0)


def test_out_of_domain():
    model = make_model([0.5, 0.5], [[[0.8, 0.2], [0.2, 0.8]]])
    with pytest.raises(IndexError):
        eps_global(model, [3])
    with pytest.raises(IndexError):
        eps_local(model, [3])


def test_single_class_rejected():
    model = make_model([1.0], [[[0.4, 0.6]]])
    with pytest.raises(ValueError):
        oracle_eps_local(model, [0], RES)
    with pytest.raises(ValueError):
        eps_global(model, [0])


def test_oracles_agree_on_random_models(rng):
    for _ in range(100):
        model, f = random_model(rng)
        assert abs(eps_global(model, f) - oracle_eps_global(model, f, RES)) <= RES
        assert abs(eps_local(model, f) - oracle_eps_local(model, f, RES)) <= RES


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_local_bisection_brackets_flip(seed):
    model, f = random_model(np.random.default_rng(seed))
    tol = 1e-10
    eps = eps_local(model, f, tol)
    assert 0 <= eps < 1
    if eps > 0:
        assert local_predicate(model, f, eps)
        assert local_predicate(model, f, max(eps - 2 * tol, 0.0))
    if eps + 2 * tol < 1:
        assert not local_predicate(model, f, eps + 2 * tol)


def test_small_gap_is_positive_not_zero():
    gap = 1e-13
    model = make_model([0.5 + gap, 0.5 - gap], [[[0.3, 0.7], [0.3, 0.7]]])
    assert 0 < eps_local(model, [0]) < 1e-12
    assert 0 < eps_global(model, [0]) < 1e-12


def test_robustness_bounded(rng):
    for _ in range(50):
        model, f = random_model(rng)
        for v in (eps_global(model, f), eps_local(model, f)):
            assert 0 <= v < 1


def test_permutation_invariance(rng):
    for _ in range(30):
        model, f = random_model(rng)
        cperm = rng.permutation(model.n_classes)
        fperm = rng.permutation(model.n_features)
        permuted = make_model(model.class_prior[cperm],
                              [model.conditionals[i][cperm] for i in fperm])
        g = f[fperm]
        assert eps_global(permuted, g) == pytest.approx(eps_global(model, f), rel=1e-9, abs=1e-15)
        assert eps_local(permuted, g) == pytest.approx(eps_local(model, f), abs=2e-10)


def test_global_depends_only_on_gap():
    a = make_model([0.5, 0.5], [[[0.9, 0.1], [0.5, 0.5]]])   # joints 0.45 / 0.25
    b = make_model([0.3, 0.7], [[[0.5, 0.5], [0.5, 0.5]]])   # joints 0.15 / 0.35
    assert eps_global(a, [0]) == pytest.approx(eps_global(b, [0]), abs=1e-15)


def test_batch_matches_single(rng):
    model = make_model(rng.dirichlet(np.ones(3)),
                       [rng.dirichlet(np.ones(4), size=3), rng.dirichlet(np.ones(2), size=3)])
    X = np.array([[a, b] for a in range(4) for b in range(2)])
    np.testing.assert_allclose(global_robustness(model, X), [eps_global(model, x) for x in X])
    np.testing.assert_allclose(local_robustness(model, X), [eps_local(model, x) for x in X])
