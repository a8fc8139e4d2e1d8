import numpy as np
import pytest

from moddouble.errors import DomainViolation
from moddouble.threej import (KernelSpec, SpinTriple, Z_factor, canonical_S0, casimir_eigen_residual, default_points,
                              kernel_S, kernel_translation_residual, momentum_kernel_Sp, normalization_residual,
                              undressed_oracle_report, undressed_translation_residual, verify_momentum_consistency,
                              verify_system)

TRIPLES = [(0.3, 0.5, 0.7), (0.2, 0.9, 0.4), (0.65, 0.15, 1.1)]
PTS = default_points(6, seed=3)


@pytest.fixture(scope="module", params=TRIPLES, ids=lambda t: "s=%g,%g,%g" % t)
def spec(request, params):
    return KernelSpec(request.param, params)


def test_common_translation(spec):
    x = PTS.T.astype(complex)
    a = kernel_S(spec, *x)
    b = kernel_S(spec, *(x + 0.37))
    assert np.max(np.abs(b / a - 1)) < 1e-10


def test_eps_halving(spec):
    x = PTS.T.astype(complex)
    half = KernelSpec(spec.spins, spec.params, eps=spec.regulator / 2)
    assert np.max(np.abs(kernel_S(half, *x) / kernel_S(spec, *x) - 1)) < 1e-5


def test_spread_is_small(spec):
    _, spread = kernel_S(spec, 0.1, -0.2, 0.4, with_spread=True)
    assert spread < 1e-6 * abs(kernel_S(spec, 0.1, -0.2, 0.4))


def test_normalization(spec):
    assert normalization_residual(spec.spins, spec.params) < 1e-9
    assert spec.norm == canonical_S0(spec.spins, spec.params)


def test_degenerate_spins_finite(params):
    S0 = canonical_S0((0.9, 0.5, 0.4), params)
    assert np.isfinite(S0)
    assert np.isfinite(kernel_S(KernelSpec((0.9, 0.5, 0.4), params), 0.1, -0.2, 0.4))


def test_complex_spin_rejected():
    with pytest.raises(DomainViolation):
        SpinTriple(0.3, 0.5 + 0.1j, 0.7)


def test_system(spec):
    rep = verify_system(spec, PTS)
    assert rep.tag == "System"
    assert {"S1", "S2", "S3", "S1~", "S2~", "S3~"} <= set(rep.details)
    assert rep.residual < 1e-7


def test_casimir_eigenvalue(spec):
    assert casimir_eigen_residual(spec, PTS) < 1e-7


@pytest.mark.parametrize("dual", [False, True])
def test_joint_shift_invariance(spec, dual):
    assert kernel_translation_residual(spec, PTS, dual=dual) < 1e-9


def test_undressed_invariance(spec):
    assert undressed_translation_residual(spec, PTS) < 1e-9


def test_undressed_oracle(params):
    rep = undressed_oracle_report(KernelSpec(TRIPLES[0], params))
    assert rep.tag == "Akern"
    assert rep.residual < 1e-5


@pytest.mark.parametrize("p", [0.2, -0.4, 0.7])
def test_sp_factorized(params, p):
    rep = verify_momentum_consistency(TRIPLES[0], p, params=params)
    assert rep.details["factorized"] < 1e-9


def test_sp_fourier(params):
    rep = verify_momentum_consistency(TRIPLES[0], 0.2, params=params)
    assert rep.details["fourier"] < 1e-5


def test_sp_translation(params):
    p, c = 0.2, 0.37
    a = momentum_kernel_Sp(TRIPLES[0], p, 0.1, -0.25, params)
    b = momentum_kernel_Sp(TRIPLES[0], p, 0.1 + c, -0.25 + c, params)
    assert abs(b / a - np.exp(-2j * np.pi * p * c)) < 1e-10


def test_sp_complex_momentum_rejected(params):
    with pytest.raises(DomainViolation):
        momentum_kernel_Sp(TRIPLES[0], 0.2 + 0.1j, 0.1, -0.25, params)


def test_Z_factor(params):
    from moddouble.qdilog import gamma
    assert abs(Z_factor(TRIPLES[0], 0.2, params) - gamma(0.2 - 0.7, params).value) < 1e-14
