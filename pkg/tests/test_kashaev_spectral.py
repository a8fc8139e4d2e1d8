import numpy as np
import pytest

from moddouble.errors import DomainViolation, NearSingularity
from moddouble.kashaev_spectral import (KashaevEigenfunction, appendix_gamma_ratio_identity, completeness_check,
                                        jost_M, length_operator_residual, measure, orthogonality_check, phi,
                                        projection_checks, projection_kernel, reflection_S, reflection_residual, rho)


@pytest.mark.parametrize("s", [0.2, 0.7, 1.3])
def test_phi_even_in_s(params, s):
    x = np.array([0.1, -0.55, 1.4 + 0.1j])
    assert np.max(np.abs(phi(x, s, params=params) / phi(x, -s, params=params) - 1)) < 1e-10


def test_eigen_example(params):
    assert length_operator_residual(0.2, 0.4, params) < 1e-8


@pytest.mark.parametrize("s", [0.2, 0.7, 1.3])
def test_eigen_random(params, s):
    x = np.random.default_rng(5).uniform(-2, 2, 12)
    assert length_operator_residual(x, s, params) < 1e-8
    assert length_operator_residual(x + 0.2j, s, params) < 1e-8


def test_eigenvalue(params):
    ef = KashaevEigenfunction(0.4, params)
    assert abs(ef.eigenvalue - 2 * np.cosh(2 * np.pi * 0.4 / params.b)) < 1e-12


def test_complex_spectral_parameter():
    with pytest.raises(DomainViolation):
        KashaevEigenfunction(0.4 + 0.1j)


def test_pole_is_excluded(params):
    with pytest.raises(NearSingularity):
        phi(0.4, 0.4, params=params)


def test_measure_at_zero(params):
    m = measure(np.array([0.0]), params)
    assert m.rho[0] == 0.0
    assert m.M[0] == 0.0
    assert m.S[0] == -1.0


def test_measure_example(params):
    m = measure(0.4, params)
    ref = 4 * np.sinh(2 * np.pi * 0.4 / 0.8) * np.sinh(2 * np.pi * 0.4 * 0.8)
    assert abs(m.rho - ref) < 1e-12 * ref
    assert m.closed_form_residual() < 1e-10


def test_S_unimodular(params):
    s = np.linspace(0.05, 3.0, 60)
    assert np.max(np.abs(np.abs(reflection_S(s, params)) - 1)) < 1e-9
    assert measure(s, params).unitarity_residual() < 1e-9


def test_rho_is_M_product(params):
    s = np.linspace(0.05, 2.0, 20)
    assert np.max(np.abs(jost_M(s, params) * jost_M(-s, params) - rho(s, params)) / rho(s, params)) < 1e-10


@pytest.mark.parametrize("lam,mu", [(0.4, 0.4), (0.4, -0.4), (0.4, 0.8)])
def test_orthogonality(params, lam, mu):
    assert orthogonality_check(lam, mu, params=params).residual < 1e-3


@pytest.fixture(scope="module")
def compl_diag(params):
    return completeness_check(0.1, 0.1, params=params)


def test_completeness_diagonal(compl_diag):
    assert compl_diag.residual < 1e-3
    assert compl_diag.details["halving_change"] < 1e-3
    assert compl_diag.details["sigma_split_residual"] < 1e-3


def test_completeness_off_diagonal(params):
    assert completeness_check(0.1, 0.6, params=params).residual < 1e-3


def test_reflection(params):
    assert reflection_residual(params=params) < 1e-9


def test_projection(params):
    out = projection_checks(params=params)
    assert max(out.values()) < 1e-9


def test_projection_kernel_symmetric(params):
    a = projection_kernel(0.4, 0.5, params)
    b = projection_kernel(0.5, 0.4, params)
    assert abs(a - np.conj(b)) < 1e-9


@pytest.mark.parametrize("z", [0.0, 0.3, 0.1 + 0.05j])
def test_gamma_ratio_identity(params, z):
    assert appendix_gamma_ratio_identity(z, params) < 1e-9
