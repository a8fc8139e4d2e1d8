import numpy as np
import pytest

from moddouble.intertwiner import (IntertwinerSpec, apply_intertwiner, inverse_residual, parseval_residual,
                                   unimodularity_residual, verify_intertwining)
from moddouble.weyl_rep import TestFunction

TestFunction.__test__ = False

F = TestFunction.gaussian(1.0, 0.1j)
PTS = np.array([0.1, -0.3, 0.25, 0.6, -0.75])


def test_spin_zero_is_identity(params):
    got = apply_intertwiner(IntertwinerSpec(0.0, params), F, PTS)
    assert np.max(np.abs(got - F(PTS))) < 1e-10


@pytest.mark.parametrize("s", [0.35, -0.6, 1.2])
def test_unimodular(params, s):
    assert unimodularity_residual(IntertwinerSpec(s, params)) < 1e-9


def test_parseval(params):
    assert parseval_residual(IntertwinerSpec(0.4, params)) < 1e-5


@pytest.mark.parametrize("s", [0.35, -0.6])
def test_inverse(params, s):
    assert inverse_residual(IntertwinerSpec(s, params)) < 1e-5


def test_reversed_multiplier_is_inverse(params):
    spec = IntertwinerSpec(0.4, params)
    k = np.linspace(-3, 3, 25)
    assert np.max(np.abs(spec.multiplier(k) * spec.reversed().multiplier(k) - 1)) < 1e-12


@pytest.mark.parametrize("s", [0.35, -0.6])
def test_intertwining(params, s):
    rep = verify_intertwining(IntertwinerSpec(s, params))
    assert rep.tag == "SysA"
    assert rep.details["v"] < 1e-10
    assert rep.details["v_fourier"] < 1e-12
    assert rep.details["e"] < 1e-5 and rep.details["f"] < 1e-5
