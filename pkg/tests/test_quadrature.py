import numpy as np
import pytest

from moddouble.errors import EndpointMass
from moddouble.qdilog import ModularParams, gamma
from moddouble.quadrature import (ContourSpec, EndDecay, RegulatorLadder, extrapolate_to_zero, gaussian_window,
                                  integrate_line, integrate_regulated, ladder_limit, separating_contour,
                                  smeared_delta_check)


@pytest.mark.parametrize("height", [0.0, 0.3, -0.2])
def test_gaussian_normalization(height):
    val, err = integrate_line(lambda t: np.exp(-np.pi * t * t), ContourSpec(imag_offset=height, half_width=8.0))
    assert abs(val - 1) < 1e-12
    assert err < 1e-10


def test_defining_integral_at_zero(params):
    g = gamma(0.0, params, strategy="strip")
    assert abs(g.value ** 2 - np.exp(1j * params.beta)) < 1e-9


def test_endpoint_mass_is_reported():
    with pytest.raises(EndpointMass):
        integrate_line(lambda t: np.exp(-0.01 * t * t), ContourSpec(half_width=3.0))


def test_constant_family():
    ladder = RegulatorLadder((4e-4, 2e-4, 1e-4))
    res = integrate_regulated(lambda e, d: (lambda t: 2.5 * np.exp(-np.pi * t * t)), ladder,
                              ContourSpec(half_width=8.0))
    assert abs(res.value - 2.5) < 1e-12
    assert res.spread < 1e-12


def test_extrapolation_is_exact_for_quadratics():
    x = [4e-4, 2e-4, 1e-4]
    y = [1 + 3 * e - 7 * e * e for e in x]
    assert abs(extrapolate_to_zero(x, y) - 1) < 1e-14


def test_ladder_limit_linear_family():
    val, spread = ladder_limit(lambda e: np.asarray(0.3 + 2j * e), 1e-3)
    assert abs(val - 0.3) < 1e-14


@pytest.mark.parametrize("eps, delta", [((4e-4, 1e-4, 2e-4), ()), ((1e-4,), (1e-4,))])
def test_ladder_validation(eps, delta):
    with pytest.raises(ValueError):
        RegulatorLadder(eps, delta, constraint=bool(delta))


def test_separating_contour_orders_singular_lines():
    c = separating_contour(lower=[(0.0, 0.2)], upper=[(0.5, 0.9)], plus=EndDecay(0.5j), minus=EndDecay(-0.5j))
    y, _ = c.height(np.array([0.0, 0.5]))
    assert np.all((0.2 < y) & (y < 0.9))


def test_smeared_narrow_gaussian_kernel():
    w = 1e-3
    kernel = lambda s, sp: np.exp(-(s - sp) ** 2 / (2 * w * w)) / np.sqrt(2 * np.pi * w * w)
    f, g = gaussian_window(0.4, 0.2), gaussian_window(0.5, 0.2)
    res = smeared_delta_check(kernel, (f, g), "δ(s−s′)", contour=ContourSpec(half_width=3.0, center=0.45,
                                                                             target_rel_tol=1e-9))
    assert res.residual < 1e-4
