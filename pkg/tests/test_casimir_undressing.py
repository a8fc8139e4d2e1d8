import numpy as np
import pytest

from moddouble.casimir_undressing import (TwoVarFunction, UndressingChain, casimir_apply, casimir_step,
                                          eigenfunction_Psi_p, inverse_consistency, multiplier_unimodularity,
                                          psi_callable, substitution_residual, tilde_casimir, tilde_casimir_apply,
                                          tilde_casimir_terms, verify_composite, verify_undressing_chain)
from moddouble.errors import DomainViolation
from moddouble.threej import KernelSpec, kernel_S
from moddouble.weyl_rep import evaluate, v_op

S1, S2, S3, P = 0.3, 0.5, 0.7, 0.2
PTS = np.array([[0.1, -0.2], [0.3 + 0.1j, 0.05], [-0.25, 0.4 - 0.05j]])
F = TwoVarFunction.gaussian_pair().closed


def rel(a, b):
    return np.max(np.abs(a - b) / np.abs(b))


@pytest.fixture(scope="module")
def chain(params):
    return UndressingChain(S1, S2, params)


@pytest.fixture(scope="module")
def steps(chain):
    return verify_undressing_chain(chain)


@pytest.mark.parametrize("spins", [(0.3, 0.5), (-0.4, 1.1), (0.0, 0.25)])
def test_five_term_matches_coproduct(params, spins):
    a = casimir_apply(*spins, F, PTS, params)
    b = casimir_apply(*spins, F, PTS, params, form="coproduct")
    assert rel(a, b) < 1e-9


def test_casimir_on_kernel(params):
    spec = KernelSpec((S1, S2, S3), params)
    Z3 = np.exp(-1j * np.pi * S3 / params.omega)
    x3 = 0.4
    func = lambda a, b: kernel_S(spec, a, b, np.full(np.shape(a), x3))
    lhs, scale = evaluate(casimir_step(0, S1, S2, params), func, np.array([[0.1, -0.2]]), with_scale=True)
    ref = (Z3 + 1 / Z3) * func(np.array([0.1]), np.array([-0.2]))
    assert np.max(np.abs(lhs - ref) / scale) < 1e-7


def test_casimir_commutes_with_K(params):
    K = v_op(params, 0) * v_op(params, 1)
    C = casimir_step(0, S1, S2, params)
    a = evaluate(C * K, F, PTS)
    b = evaluate(K * C, F, PTS)
    assert rel(a, b) < 1e-10


def test_tilde_terms_by_hand(params):
    x1, x2 = PTS[:, 0], PTS[:, 1]
    by_hand = sum(c * F(x1 + d1, x2 + d2) for (d1, d2), c in tilde_casimir_terms(S1, S2, x1, x2, params))
    assert rel(by_hand, tilde_casimir_apply(S1, S2, F, PTS, params)) < 1e-12


def test_tilde_is_last_step(params):
    a = evaluate(tilde_casimir(S1, S2, params), F, PTS)
    b = evaluate(casimir_step(3, S1, S2, params), F, PTS)
    assert np.all(a == b)


def test_bad_step(params):
    with pytest.raises(ValueError):
        casimir_step(4, S1, S2, params)


@pytest.mark.parametrize("key,tol", [("step1", 1e-8), ("step2", 1e-4), ("step3", 1e-8),
                                     ("K_step1", 1e-9), ("K_step2", 1e-9), ("K_step3", 1e-9)])
def test_chain_steps(steps, key, tol):
    assert steps.details[key] < tol


def test_multipliers_unimodular(chain):
    assert multiplier_unimodularity(chain) < 1e-9


def test_substitution(params):
    assert substitution_residual(S1, S2, F, PTS, params) < 1e-9


def test_composite(chain):
    rep = verify_composite(chain)
    assert rep.tag == "Akern"
    assert rep.residual < 1e-8


def test_A_of_A_inverse(chain):
    assert inverse_consistency(chain) < 1e-4


def test_psi_eigen_casimir(params):
    psi = psi_callable(S1, S2, S3, P, params)
    Z3 = np.exp(-1j * np.pi * S3 / params.omega)
    lhs, scale = evaluate(tilde_casimir(S1, S2, params), psi, PTS, with_scale=True)
    assert np.max(np.abs(lhs - (Z3 + 1 / Z3) * psi(PTS[:, 0], PTS[:, 1])) / scale) < 1e-7


def test_psi_eigen_K(params):
    psi = psi_callable(S1, S2, S3, P, params)
    lhs = evaluate(v_op(params, 0) * v_op(params, 1), psi, PTS)
    assert rel(lhs, np.exp(1j * np.pi * P / params.omega) * psi(PTS[:, 0], PTS[:, 1])) < 1e-9


def test_psi_even_in_s3(params):
    a = eigenfunction_Psi_p(S1, S2, S3, P, PTS[:, 0], PTS[:, 1], params)
    b = eigenfunction_Psi_p(S1, S2, -S3, P, PTS[:, 0], PTS[:, 1], params)
    assert rel(a, b) < 1e-9


def test_psi_translation(params):
    c = 0.37
    a = eigenfunction_Psi_p(S1, S2, S3, P, 0.1, -0.2, params)
    b = eigenfunction_Psi_p(S1, S2, S3, P, 0.1 + c, -0.2 + c, params)
    assert abs(b / a - np.exp(-2j * np.pi * P * c)) < 1e-10


def test_psi_complex_momentum(params):
    with pytest.raises(DomainViolation):
        eigenfunction_Psi_p(S1, S2, S3, 0.2 + 0.1j, 0.1, -0.2, params)
