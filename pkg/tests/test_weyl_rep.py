import numpy as np
import pytest

from moddouble.errors import DegreeOverflow
from moddouble.weyl_rep import (Kind, OpExpr, TestFunction, apply, check_coproduct, check_relations,
                                coproduct_generator, evaluate, fourier_conjugation_residuals, fourier_op, generator,
                                u_op, v_op)

TestFunction.__test__ = False  # not a pytest class

RNG = np.random.default_rng(11)
POINTS = RNG.uniform(-1, 1, 10) + 1j * RNG.uniform(-0.3, 0.3, 10)


@pytest.fixture(scope="module")
def f():
    return TestFunction.gaussian(0.7 + 0.2j, 0.3 - 0.1j, (1.0, 0.5, -0.25))


def test_weyl_relation(params, f):
    q = params.q
    a = apply(u_op(params) * v_op(params), f)(0.3)
    b = apply(q * q * v_op(params) * u_op(params), f)(0.3)
    assert abs(a - b) < 1e-12


def test_identity_word(f):
    assert np.all(apply(OpExpr.identity(), f)(POINTS) == f(POINTS))


def test_shift_of_gaussian(params):
    g = TestFunction.gaussian(1.0)
    got = apply(v_op(params), g)(POINTS)
    ref = np.exp(-(POINTS + 2 * params.omega_prime) ** 2)
    assert np.max(np.abs(got - ref)) < 1e-12


@pytest.mark.parametrize("kind", [Kind.e_small, Kind.f_small, Kind.e_primed, Kind.f_primed])
def test_orderings_agree(params, f, kind):
    a = apply(generator(kind, 0.4, params, ordering=0), f)(POINTS)
    b = apply(generator(kind, 0.4, params, ordering=1), f)(POINTS)
    assert np.max(np.abs(a - b)) < 1e-12 * max(1.0, np.max(np.abs(a)))


def test_K_independent_of_spin(params, f):
    a = apply(generator(Kind.K, 0.1, params), f)(POINTS)
    b = apply(generator(Kind.K, 0.9, params), f)(POINTS)
    assert np.all(a == b)


@pytest.mark.parametrize("s", [0.4, 0.0, -1.1])
@pytest.mark.parametrize("b", [0.6, 0.8, 1.3])
def test_relations(s, b):
    from moddouble.qdilog import ModularParams
    rep = check_relations(s, params=ModularParams(b))
    assert rep.tag == "EFK"
    assert rep.residual < 1e-10
    assert any(k.startswith("[E,E_tilde") or "~]" in k for k in rep.details)


def test_coproduct_K(params):
    g = TestFunction.gaussian(1.0).tensor(TestFunction.gaussian(0.5, 0.3j))
    x1, x2 = np.array([0.1, 0.3j]), np.array([-0.2, 0.4])
    a = apply(coproduct_generator(Kind.K, 0.3, 0.5, params), g)(x1, x2)
    b = g(x1 + 2 * params.omega_prime, x2 + 2 * params.omega_prime)
    assert np.max(np.abs(a - b)) < 1e-12


def test_coassociativity_on_K(params):
    K = [v_op(params, i) for i in range(3)]
    h = TestFunction.gaussian(1.0).tensor(TestFunction.gaussian(0.7)).tensor(TestFunction.gaussian(0.9, 0.1))
    a = apply((K[0] * K[1]) * K[2], h)(0.1, -0.2, 0.3)
    b = apply(K[0] * (K[1] * K[2]), h)(0.1, -0.2, 0.3)
    assert abs(a - b) < 1e-12


def test_coproduct_E_by_hand(params):
    s1, s2 = 0.3, 0.5
    g = TestFunction.gaussian(1.0).tensor(TestFunction.gaussian(0.5, 0.3j))
    by_word = apply(coproduct_generator(Kind.E, s1, s2, params), g)(0.1, -0.2)
    E1K2 = generator(Kind.E, s1, params, var=0) * v_op(params, 1)
    E2 = generator(Kind.E, s2, params, var=1)
    by_hand = apply(E1K2, g)(0.1, -0.2) + apply(E2, g)(0.1, -0.2)
    assert abs(by_word - by_hand) < 1e-12 * max(1.0, abs(by_hand))


def test_coproduct_relations(params):
    assert check_coproduct(0.3, -0.45, params=params).residual < 1e-10


def test_fourier_conjugation(params):
    assert max(fourier_conjugation_residuals(params=params).values()) < 1e-10


def test_fourier_inverse(f):
    g = apply(fourier_op(inverse=True) * fourier_op(), f)
    assert np.max(np.abs(g(POINTS) - f(POINTS))) < 1e-12


def test_evaluate_matches_apply(params, f):
    word = generator(Kind.E, 0.4, params)
    a = evaluate(word, f, POINTS)
    b = apply(word, f)(POINTS)
    assert np.max(np.abs(a - b)) < 1e-12 * max(1.0, np.max(np.abs(b)))


def test_degree_cap():
    g = TestFunction.gaussian(1.0)
    with pytest.raises(DegreeOverflow):
        for _ in range(64):
            g = g.mul_poly(0, (0.0, 1.0))
