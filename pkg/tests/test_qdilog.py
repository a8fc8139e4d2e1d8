import numpy as np
import pytest

from moddouble.errors import NearSingularity
from moddouble.qdilog import (ModularParams, conjugation_check, fit_leading_coefficient, gamma, gamma_array,
                              phi_of_x, pole_expansion, reflection_product)

BS = [0.6, 0.8, 1.3]


def test_parameters(params):
    assert abs(params.omega * params.omega_prime + 0.25) < 1e-15
    assert abs(params.omega_dprime - (params.omega + params.omega_prime)) < 1e-15
    assert params.dual.b == pytest.approx(1 / params.b)


def test_tends_to_one_at_large_real_part(params):
    x = 6 * abs(params.omega_dprime.imag)
    assert abs(gamma(x, params).value - 1) < 1e-8


def test_square_at_zero(params):
    assert abs(gamma(0.0, params).value ** 2 - np.exp(1j * params.beta)) < 1e-9


@pytest.mark.parametrize("b", BS)
@pytest.mark.parametrize("x", [0.3, -0.7 + 0.2j, 1.9 - 0.4j])
def test_shift_equations(b, x):
    p = ModularParams(b)
    w, wp = p.omega, p.omega_prime
    lhs = gamma(x + wp, p).value / gamma(x - wp, p).value
    assert abs(lhs - (1 + np.exp(-1j * np.pi * x / w))) < 1e-8 * abs(lhs)
    lhs = gamma(x + w, p).value / gamma(x - w, p).value
    assert abs(lhs - (1 + np.exp(-1j * np.pi * x / wp))) < 1e-8 * abs(lhs)


def test_phi_of_x_is_gamma(params):
    assert phi_of_x(0.37, params) == gamma(0.37, params).value


def test_phi_ratio(params):
    x = 0.2
    u = np.exp(-1j * np.pi * x / params.omega)
    r = phi_of_x(x + params.omega_prime, params) / phi_of_x(x - params.omega_prime, params)
    assert abs(1 / r - 1 / (1 + u)) < 1e-8


@pytest.mark.parametrize("b", BS)
def test_modular_symmetry(b):
    p = ModularParams(b)
    assert abs(phi_of_x(0.37, p) - phi_of_x(0.37, p.dual)) < 1e-8


@pytest.mark.parametrize("z, tol", [(0.0, 1e-9), (0.5, 1e-9), (0.2 + 0.1j, 1e-8)])
def test_reflection(params, z, tol):
    prod = gamma(z, params).value * gamma(-z, params).value
    assert abs(prod - reflection_product(z, params)) < tol


def test_reflection_closed_form_at_half(params):
    assert abs(reflection_product(0.5, params) - np.exp(1j * params.beta + 1j * np.pi / 4)) < 1e-15


@pytest.mark.parametrize("z, tol", [(0.4, 1e-9), (0.3 + 0.2j, 1e-8), (-0.7 - 0.1j, 1e-8)])
def test_conjugation(params, z, tol):
    assert conjugation_check(z, params) < tol


def test_unimodular_on_real_axis(params):
    x = np.linspace(-4, 4, 33)
    assert np.max(np.abs(np.abs(gamma_array(x, params)) - 1)) < 1e-12


def test_pole_data(params):
    c = params.c
    pole = pole_expansion("BasePole", params)
    zero = pole_expansion("BaseZero", params)
    assert pole.location == -params.omega_dprime and zero.location == params.omega_dprime
    assert abs(pole.leading_coefficient + 1 / (2j * np.pi * c)) < 1e-15
    assert abs(zero.leading_coefficient - 2j * np.pi / c) < 1e-15


@pytest.mark.parametrize("which", ["BasePole", "BaseZero"])
def test_circle_fit(params, which):
    fit = fit_leading_coefficient(which, params)
    ref = pole_expansion(which, params).leading_coefficient
    assert abs(fit / ref - 1) < 1e-5


def test_near_singularity(params):
    with pytest.raises(NearSingularity):
        gamma(params.omega_dprime, params)
    with pytest.raises(NearSingularity):
        gamma(-params.omega_dprime - 2 * params.omega, params)


@pytest.mark.parametrize("strategy", ["strip", "shift"])
def test_strategies_agree(params, strategy):
    z = 0.3 + 0.1j
    assert abs(gamma(z, params, strategy).value - gamma(z, params).value) < 1e-12
