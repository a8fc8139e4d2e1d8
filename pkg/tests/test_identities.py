import numpy as np
import pytest

from moddouble.errors import DomainViolation
from moddouble.identities import (IdentityCase, IdentityId, eval_f1f2, eval_ft1, eval_ft2, eval_ft3, eval_invf,
                                  eval_invf_shift, f1_rhs, f2_rhs, run_case)
from moddouble.qdilog import ModularParams


@pytest.fixture(scope="module")
def hw(params):
    return abs(params.omega_dprime)


@pytest.mark.parametrize("z", [0.3 - 0.08j, 0.3 + 0.2j, -0.4 + 0.6j])
def test_ft1(params, z):
    rep = eval_ft1(z, params)
    assert rep.tag == "FT1eps"
    assert rep.rel_residual < 1e-6


def test_ft1_near_gamma_of_real(params):
    assert eval_ft1(params.omega_dprime + 0.3, params).rel_residual < 1e-6


def test_ft1_gate(params):
    with pytest.raises(DomainViolation):
        eval_ft1(-0.5j, params)


@pytest.mark.parametrize("x, z", [(0.1, 0.2 - 0.05j), (0.0, 0.3 + 0.1j), (-0.3 + 0.1j, 0.5 + 0.3j)])
def test_ft2(params, x, z):
    assert eval_ft2(x, z, params).rel_residual < 1e-6


def test_ft2_large_x_reduces_to_ft1(params):
    z = 0.3 + 0.2j
    x = 6 * abs(params.omega_dprime.imag)
    r2, r1 = eval_ft2(x, z, params), eval_ft1(z, params)
    assert abs(r2.lhs - r1.lhs) < 1e-6 * abs(r1.lhs)


@pytest.mark.parametrize("x, y, z", [(0.1, -0.15, 0.2 - 0.05j), (0.2, 0.2, 0.1 + 0.2j)])
def test_ft3(params, x, y, z):
    assert eval_ft3(x, y, z, params).rel_residual < 1e-6


def test_ft3_large_y_reduces_to_ft2(params):
    x, z = 0.1, 0.2 + 0.2j
    y = 6 * abs(params.omega_dprime.imag)
    r3, r2 = eval_ft3(x, y, z, params), eval_ft2(x, z, params)
    assert r3.rel_residual < 1e-6
    assert abs(r3.rhs - r2.rhs) < 1e-6 * abs(r2.rhs)


def test_f1f2(params, hw):
    rep = eval_f1f2(0.1j * hw, 0.6j * hw, 0.25 - 0.06j, params)
    assert rep.rel_residual < 1e-6
    assert rep.details["F2_rel_residual"] < 1e-6


@pytest.mark.parametrize("a, bp, s", [(0.1j, 0.6j, 0.25 - 0.06j), (0.3 - 0.1j, -0.2 + 0.2j, -0.4 - 0.1j)])
def test_f1_equals_f2(params, a, bp, s):
    r1, r2 = f1_rhs(a, bp, s, params), f2_rhs(a, bp, s, params)
    assert abs(r1 - r2) < 1e-9 * abs(r1)


@pytest.mark.parametrize("s, a", [(0.25 + 0.05j, 0.1j), (0.25 - 0.05j, 0.9j)])
def test_f1f2_gate(params, s, a):
    with pytest.raises(DomainViolation):
        eval_f1f2(a, 0.1j, s, params)


def test_invf(params, hw):
    assert eval_invf(0.2, 0.1j * hw, 0.5j * hw, params).rel_residual < 1e-6


def test_invf_degenerate(params):
    rep = eval_invf(0.2, 0.3j, 0.3j, params)
    assert abs(rep.lhs - 1) < 1e-6


def test_invf_shift(params):
    b = params.b
    assert eval_invf_shift(-0.5j / b + 0.1, -0.25j * b, 0.25j * b, params).rel_residual < 1e-6


def test_run_case(params):
    rep = run_case(IdentityCase(IdentityId.FT1, {"z": 0.3 + 0.1j}), params)
    assert rep.identity_id == "FT1" and rep.rel_residual < 1e-6


def test_report_round_trip(params):
    from moddouble.reports import ResidualReport
    rep = eval_ft1(0.3 + 0.1j, params)
    back = ResidualReport.from_json(rep.to_json())
    assert back.to_dict() == rep.to_dict()


@pytest.mark.parametrize("b", [0.6, 1.3])
def test_ft2_other_moduli(b):
    assert eval_ft2(0.1, 0.2 + 0.1j, ModularParams(b)).rel_residual < 1e-6
