"""
Integral identities of the modular quantum dilogarithm.

Each ``eval_*`` function computes the left side by contour quadrature and the
right side in closed form, and returns a :class:`ResidualReport`.

Contours are built from the singular half-lines of the integrand. A factor
``gamma(c - t)`` has poles on ``{c + omega'' + i y, y >= 0}`` (an upper
half-line) and zeros on ``{c - omega'' - i y}``; a factor ``gamma(t + c)`` has
poles on ``{-c - omega'' - i y}`` and zeros on ``{-c + omega'' + i y}``.
Denominators contribute their zeros as poles. The ``- i0`` prescriptions
decide which side of the contour each half-line lies on; they are realized
as a finite ``eps`` taken along a regulator ladder and extrapolated to zero.

Where the straight line diverges the contour ends are tilted beyond all
singular abscissae. This continues the left side analytically, so the FT
identities are tested on the largest region reachable with bounded tilts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainViolation
from .qdilog import ModularParams, gamma_array
from .quadrature import (
    ContourSpec,
    EndDecay,
    RegulatorLadder,
    integrate_line,
    integrate_regulated,
    separating_contour,
)
from .reports import ResidualReport

PI = np.pi
DEFAULT_LADDER = RegulatorLadder((4e-4, 2e-4, 1e-4))
_MARGIN = 0.15


class IdentityId(str, enum.Enum):
    FT1 = "FT1"
    FT2 = "FT2"
    FT3 = "FT3"
    F1F2 = "F1F2"
    InvF = "InvF"


TAGS = {
    IdentityId.FT1: "FT1eps",
    IdentityId.FT2: "FT2eps",
    IdentityId.FT3: "FT3eps",
    IdentityId.F1F2: "F1",
    IdentityId.InvF: "invF",
}


@dataclass
class IdentityCase:
    """One parameter point of an identity together with its regulators."""

    identity_id: IdentityId
    parameters: dict
    regulators: RegulatorLadder = field(default_factory=lambda: DEFAULT_LADDER)
    domain_ok: bool = True

    def __post_init__(self):
        self.identity_id = IdentityId(self.identity_id)
        if self.identity_id is IdentityId.F1F2:
            p = self.parameters
            self.domain_ok = f1f2_domain_ok(p["a"], p["b_param"], p["s"])


def _g(z, params, factor=""):
    return gamma_array(np.asarray(z, dtype=complex), params, factor=factor)


def _tilt_note(contour: ContourSpec) -> str:
    if not contour.tilts:
        return "straight line"
    parts = [f"{'+' if t.side > 0 else '-'} end slope {t.slope * t.side:+.3g}" for t in contour.tilts]
    return "tilted ends (" + ", ".join(parts) + ")"


def _report(identity_id, params, parameters, res, rhs, condition, ladder=None, extra=None):
    rep = ResidualReport(
        identity_id=identity_id.value,
        tag=TAGS[identity_id],
        parameters={"b": params.b, **parameters},
        lhs=complex(res.value) if hasattr(res, "value") else complex(res[0]),
        rhs=rhs,
        quadrature_error=res.quadrature_error if hasattr(res, "quadrature_error") else res[1],
        regulator_spread=getattr(res, "spread", 0.0),
        condition=condition,
        regulators=ladder.to_dict() if ladder is not None else {},
    )
    if extra:
        rep.details.update(extra)
    return rep


# --------------------------------------------------------------------------- #
#  FT1 - FT3
# --------------------------------------------------------------------------- #
def ft1_contour(z, params: ModularParams) -> ContourSpec:
    """Contour for the FT1 integrand; raises DomainViolation when none exists."""
    wpp = params.omega_dprime
    return separating_contour(
        lower=[(0.0, 0.0)],
        plus=EndDecay(wpp - z, -1.0),
        minus=EndDecay(-z),
        margin=_MARGIN,
        target_rel_tol=1e-11,
    )


def eval_ft1(z: complex, params: ModularParams | None = None,
             ladder: RegulatorLadder | None = None) -> ResidualReport:
    """
    ``∫ dt exp(-2 pi i t z) / gamma(omega'' - i0 - t) = c gamma(z - omega'')``.

    On the real line the integral converges for ``0 < Im z < Q/2``; outside
    that band the ends are tilted, which continues both sides analytically.

    Raises
    ------
    DomainViolation
        No admissible contour (e.g. ``Re z = 0`` with ``Im z <= 0``).
    """
    params = params or ModularParams()
    ladder = ladder or DEFAULT_LADDER
    z = complex(z)
    wpp = params.omega_dprime
    contour = ft1_contour(z, params)

    def family(eps, delta):
        return lambda t: np.exp(-2j * PI * t * z) / _g(wpp - 1j * eps - t, params)

    res = integrate_regulated(family, ladder, contour, condition="0 < Im z (tilt-continued)")
    rhs = params.c * _g(z - wpp, params)[()]
    cond = f"FT1 singular line Re t = 0 below the contour; {_tilt_note(contour)}"
    return _report(IdentityId.FT1, params, {"z": z}, res, rhs, cond, ladder)


def ft2_contour(x, z, params: ModularParams) -> ContourSpec:
    wpp = params.omega_dprime
    hq = 0.5 * params.Q
    return separating_contour(
        lower=[(0.0, 0.0)],
        upper=[(x.real, x.imag + hq)],
        plus=EndDecay(wpp - x - z),
        minus=EndDecay(-z),
        margin=_MARGIN,
        target_rel_tol=1e-11,
    )


def eval_ft2(x: complex, z: complex, params: ModularParams | None = None,
             ladder: RegulatorLadder | None = None) -> ResidualReport:
    """``∫ dt exp(-2 pi i t z) gamma(x - t)/gamma(omega'' - i0 - t)``
    against ``c gamma(x) gamma(z - omega'') / gamma(x + z)``."""
    params = params or ModularParams()
    ladder = ladder or DEFAULT_LADDER
    x, z = complex(x), complex(z)
    wpp = params.omega_dprime
    contour = ft2_contour(x, z, params)

    def family(eps, delta):
        return lambda t: np.exp(-2j * PI * t * z) * _g(x - t, params) / _g(wpp - 1j * eps - t, params)

    res = integrate_regulated(family, ladder, contour, condition="0 < Im z, Im(x+z) < Q/2 (tilt-continued)")
    g = _g(np.array([x, z - wpp, x + z]), params)
    rhs = params.c * g[0] * g[1] / g[2]
    cond = f"FT2 lower line Re t = 0, upper line Re t = Re x; {_tilt_note(contour)}"
    return _report(IdentityId.FT2, params, {"x": x, "z": z}, res, rhs, cond, ladder)


def ft3_contour(x, y, z, params: ModularParams) -> ContourSpec:
    hq = 0.5 * params.Q
    s = x + y + z
    return separating_contour(
        lower=[(0.0, 0.0), (s.real, s.imag)],
        upper=[(x.real, x.imag + hq), (y.real, y.imag + hq)],
        plus=EndDecay(2 * params.omega_dprime),
        minus=EndDecay(-z),
        margin=_MARGIN,
        target_rel_tol=1e-11,
    )


def eval_ft3(x: complex, y: complex, z: complex, params: ModularParams | None = None,
             ladder: RegulatorLadder | None = None) -> ResidualReport:
    """``∫ dt exp(-2 pi i t z) gamma(x-t) gamma(y-t) / (gamma(omega''-i0-t) gamma(x+y+z+omega''-i0-t))``
    against ``c gamma(x) gamma(y) gamma(z - omega'') / (gamma(x+z) gamma(y+z))``."""
    params = params or ModularParams()
    ladder = ladder or DEFAULT_LADDER
    x, y, z = complex(x), complex(y), complex(z)
    wpp = params.omega_dprime
    contour = ft3_contour(x, y, z, params)
    sxyz = x + y + z

    def family(eps, delta):
        def f(t):
            num = _g(x - t, params) * _g(y - t, params)
            den = _g(wpp - 1j * eps - t, params) * _g(sxyz + wpp - 1j * eps - t, params)
            return np.exp(-2j * PI * t * z) * num / den

        return f

    res = integrate_regulated(family, ladder, contour, condition="0 < Im z (tilt-continued)")
    g = _g(np.array([x, y, z - wpp, x + z, y + z]), params)
    rhs = params.c * g[0] * g[1] * g[2] / (g[3] * g[4])
    cond = f"FT3 lower lines Re t = 0, Re(x+y+z); upper lines Re x, Re y; {_tilt_note(contour)}"
    return _report(IdentityId.FT3, params, {"x": x, "y": y, "z": z}, res, rhs, cond, ladder)


# --------------------------------------------------------------------------- #
#  F1 / F2 and the inverse formula
# --------------------------------------------------------------------------- #
def f1f2_domain_ok(a, b_param, s) -> bool:
    """Convergence conditions ``Im s < 0`` and ``Im(a - b - s) < 0``."""
    a, b_param, s = complex(a), complex(b_param), complex(s)
    return s.imag < 0 and (a - b_param - s).imag < 0


def f1_rhs(a, b_param, s, params: ModularParams) -> complex:
    """Closed form (F1): ``c e^{2 pi i s (b - w'')} g(a-b+w'') g(-s-w'') / g(a-b-s+w'')``."""
    wpp = params.omega_dprime
    g = _g(np.array([a - b_param + wpp, -s - wpp, a - b_param - s + wpp]), params)
    return complex(params.c * np.exp(2j * PI * s * (b_param - wpp)) * g[0] * g[1] / g[2])


def f2_rhs(a, b_param, s, params: ModularParams) -> complex:
    """Closed form (F2): ``c^-1 e^{2 pi i s (a + w'')} g(b-a+s-w'') / (g(b-a-w'') g(s+w''))``."""
    wpp = params.omega_dprime
    g = _g(np.array([b_param - a + s - wpp, b_param - a - wpp, s + wpp]), params)
    return complex(np.exp(2j * PI * s * (a + wpp)) * g[0] / (params.c * g[1] * g[2]))


def f1f2_contour(a, b_param, s, params: ModularParams) -> ContourSpec:
    hq = 0.5 * params.Q
    kp, km = -s, a - b_param - s
    rate = min(2 * PI * kp.imag, -2 * PI * km.imag)
    return separating_contour(
        lower=[(-a.real, -a.imag - hq)],
        upper=[(-b_param.real, -b_param.imag + hq)],
        plus=EndDecay(kp),
        minus=EndDecay(km),
        margin=min(_MARGIN, 0.25 * hq),
        allow_tilt=False,
        min_rate=min(0.6, 0.999 * rate),
        preferred=0.0,
        target_rel_tol=1e-11,
    )


def eval_f1f2(a: complex, b_param: complex, s: complex, params: ModularParams | None = None,
              ladder: RegulatorLadder | None = None) -> ResidualReport:
    """
    ``∫ dt exp(-2 pi i t s) gamma(t + a)/gamma(t + b)`` against both closed forms.

    ``rel_residual`` compares the quadrature with (F1); the report details
    carry the (F2) residual and the (F1)-(F2) closed-form gap.

    Raises
    ------
    DomainViolation
        ``Im s >= 0`` or ``Im(a - b - s) >= 0``.
    """
    params = params or ModularParams()
    a, b_param, s = complex(a), complex(b_param), complex(s)
    if not s.imag < 0:
        raise DomainViolation(f"condition Im(s) < 0 fails: Im(s) = {s.imag:.4g}")
    if not (a - b_param - s).imag < 0:
        raise DomainViolation(f"condition Im(a-b-s) < 0 fails: {(a - b_param - s).imag:.4g}")
    contour = f1f2_contour(a, b_param, s, params)
    integrand = lambda t: np.exp(-2j * PI * t * s) * _g(t + a, params) / _g(t + b_param, params)
    val, err = integrate_line(integrand, contour)
    r1 = f1_rhs(a, b_param, s, params)
    r2 = f2_rhs(a, b_param, s, params)
    extra = {
        "F2_rel_residual": abs(val - r2) / abs(r2),
        "F1_F2_closed_form_gap": abs(r1 - r2) / abs(r1),
    }
    rep = _report(IdentityId.F1F2, params, {"a": a, "b_param": b_param, "s": s}, (val, err), r1,
                  "Im(s) < 0, Im(a-b-s) < 0; straight line", None)
    rep.details.update(extra)
    rep.rel_residual = max(rep.rel_residual, extra["F2_rel_residual"])
    return rep


def invf_domain_ok(t, a, b_param, params: ModularParams) -> bool:
    hq = 0.5 * params.Q
    return (t + a).imag + hq > 0 and (t + b_param).imag - hq < 0


def invf_contour(t, a, b_param, params: ModularParams) -> ContourSpec:
    hq = 0.5 * params.Q
    wpp = params.omega_dprime
    kp, km = t + a + wpp, t + b_param - wpp
    rate = min(2 * PI * kp.imag, -2 * PI * km.imag)
    d = a - b_param
    return separating_contour(
        lower=[(d.real, d.imag)],
        upper=[(0.0, 0.0)],
        plus=EndDecay(kp),
        minus=EndDecay(km),
        margin=min(_MARGIN, 0.3 * max(-d.imag, 0.05)),
        allow_tilt=False,
        min_rate=min(0.6, 0.999 * rate),
        target_rel_tol=1e-11,
    )


def invf_integral(t, a, b_param, params: ModularParams, contour: ContourSpec | None = None):
    """Right side of the inverse formula by quadrature; returns ``(value, error)``."""
    wpp = params.omega_dprime
    t, a, b_param = complex(t), complex(a), complex(b_param)
    if not invf_domain_ok(t, a, b_param, params):
        raise DomainViolation("inverse formula needs Im(t+a) > -Q/2 and Im(t+b) < Q/2")
    contour = contour or invf_contour(t, a, b_param, params)
    f = lambda s: (np.exp(2j * PI * s * (t + a + wpp)) * _g(s + b_param - a - wpp, params)
                   / _g(s + wpp, params))
    val, err = integrate_line(f, contour)
    pref = 1.0 / (params.c * _g(b_param - a - wpp, params)[()])
    return complex(pref * val), float(abs(pref) * err)


def eval_invf(t: complex, a: complex, b_param: complex, params: ModularParams | None = None,
              contour: ContourSpec | None = None) -> ResidualReport:
    """
    Inverse formula: the ``s``-integral on a line below ``s = 0`` against
    ``gamma(t + a)/gamma(t + b)``.

    ``a == b`` short-circuits to the constant 1: the prefactor and integrand
    both degenerate there.
    """
    params = params or ModularParams()
    t, a, b_param = complex(t), complex(a), complex(b_param)
    parameters = {"t": t, "a": a, "b_param": b_param}
    if a == b_param:
        return _report(IdentityId.InvF, params, parameters, (1.0, 0.0), 1.0,
                       "a = b: removable degeneracy, closed-form short-circuit")
    val, err = invf_integral(t, a, b_param, params, contour)
    g = _g(np.array([t + a, t + b_param]), params)
    return _report(IdentityId.InvF, params, parameters, (val, err), g[0] / g[1],
                   "Im(t+a) > -Q/2, Im(t+b) < Q/2; contour below s = 0")


def eval_invf_shift(t: complex, a: complex, b_param: complex,
                    params: ModularParams | None = None) -> ResidualReport:
    """Consistency of the inverse formula at ``t`` and ``t + 2 omega'``.

    The integral at ``t + 2 omega'`` is compared with the integral at ``t``
    times the ratio of shift factors of ``gamma(t + a)/gamma(t + b)``.
    """
    params = params or ModularParams()
    wp, w = params.omega_prime, params.omega
    v0, e0 = invf_integral(t, a, b_param, params)
    v1, e1 = invf_integral(t + 2 * wp, a, b_param, params)
    fac = (1 + np.exp(-1j * PI * (t + a + wp) / w)) / (1 + np.exp(-1j * PI * (t + b_param + wp) / w))
    rep = _report(IdentityId.InvF, params, {"t": t, "a": a, "b_param": b_param, "shift": "2omega'"},
                  (v1, e1 + e0), v0 * fac, "both t and t + 2 omega' inside the inverse-formula domain")
    return rep


def run_case(case: IdentityCase, params: ModularParams) -> ResidualReport:
    """Evaluate an IdentityCase."""
    p = case.parameters
    iid = case.identity_id
    if iid is IdentityId.FT1:
        return eval_ft1(p["z"], params, case.regulators)
    if iid is IdentityId.FT2:
        return eval_ft2(p["x"], p["z"], params, case.regulators)
    if iid is IdentityId.FT3:
        return eval_ft3(p["x"], p["y"], p["z"], params, case.regulators)
    if iid is IdentityId.F1F2:
        return eval_f1f2(p["a"], p["b_param"], p["s"], params, case.regulators)
    return eval_invf(p["t"], p["a"], p["b_param"], params)
