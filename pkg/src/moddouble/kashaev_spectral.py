"""
Kashaev eigenfunctions of the length operator ``v + u + u^-1`` and the
Plancherel data of its continuous spectrum.

    phi(x, s) = exp(-i pi (x - w'')^2) gamma(x + s - w'' + i0) gamma(x - s - w'' + i0)

with ``u = exp(-i pi x / w)`` and ``v`` the shift ``x -> x + 2 w'``. The
measure is ``rho(s) = M(s) M(-s) = 4 sinh(2 pi s / b) sinh(2 pi s b)`` with

    M(s) = c exp(-2 i pi s^2 - 2 i pi s w'') gamma(2 s + w'')

and reflection coefficient ``S(s) = M(s) / M(-s)``.

Orthogonality and completeness are delta identities. They are checked after
smearing with Gaussian windows:

* orthogonality smears ``phi(x, s')`` in ``s'`` along a line through the
  origin tilted so that it passes above the pole at ``s' = -x - i0`` and below
  the pole at ``s' = x + i0``, then integrates the product over real ``x``;
* completeness smears ``M(s) phi(y, s)`` in ``y`` along a line lifted into the
  upper half plane, where ``phi`` is analytic, then integrates over ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, NearSingularity
from .qdilog import ModularParams, gamma_array, log_gamma_array
from .quadrature import (ContourSpec, RegulatorLadder, SmearedDeltaResult, extrapolate_to_zero,
                         gaussian_window, ladder_limit, line_rule)

PI = math.pi
DEFAULT_WIDTH = 0.05
DEFAULT_LADDER = RegulatorLadder((4e-4, 2e-4, 1e-4))
_THETA = 0.3  # slope of the tilted s-line in the orthogonality smear
_ETA = 0.1  # height of the lifted x-line in the completeness smear
_WINDOW_SPAN = 12.0  # window truncation in units of its width
_GL_NODES = 24


def default_eps(params: ModularParams) -> float:
    """Default ``i0`` regulator ``1e-4 |Im w''|``."""
    return 1e-4 * params.Q / 2


def _lg(z, params, factor=""):
    return log_gamma_array(z, params, factor=factor)[0]


def log_phi(x, s, params: ModularParams, eps: float = 0.0) -> np.ndarray:
    """``log phi`` with the ``+i0`` realized as ``+i eps``; broadcasts ``x`` against ``s``."""
    x = np.asarray(x, dtype=complex)
    s = np.asarray(s, dtype=complex)
    w2 = params.omega_dprime
    return (-1j * PI * (x - w2) ** 2 + _lg(x + s - w2 + 1j * eps, params, "phi")
            + _lg(x - s - w2 + 1j * eps, params, "phi"))


def phi_regulated(x, s, eps: float, params: ModularParams | None = None) -> np.ndarray:
    """``phi(x, s)`` at a finite regulator ``eps >= 0``."""
    params = params or ModularParams()
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return np.exp(log_phi(x, s, params, eps))


def phi(x, s, eps: float | None = None, params: ModularParams | None = None, with_spread: bool = False):
    """
    Kashaev eigenfunction ``phi(x, s)``.

    The value is the ``eps -> 0`` limit extrapolated from the halving ladder
    ``eps, eps/2, eps/4`` (default ``eps = 1e-4 |Im w''|``).

    Parameters
    ----------
    x : complex or array_like
    s : real or array_like
    eps : float, optional
    params : ModularParams, optional
    with_spread : bool
        Also return the ladder spread.

    Raises
    ------
    NearSingularity
        Near ``x = +-s`` and the other poles of the two gamma factors.
    """
    params = params or ModularParams()
    if np.iscomplexobj(s) and np.any(np.imag(s) != 0):
        raise DomainViolation("spectral parameter s must be real")
    eps = default_eps(params) if eps is None else eps
    if not eps > 0:
        raise ValueError("eps must be positive")
    # the i0 only displaces the poles at x = +-s, it does not remove them
    xa, sa = np.asarray(x, dtype=complex), np.real(np.asarray(s))
    for sign in (1, -1):
        d = np.abs(xa - sign * sa)
        if np.any(d < params.exclusion_radius):
            raise NearSingularity(f"phi: x within {params.exclusion_radius:.2g} of the pole at x = {'+' if sign > 0 else '-'}s",
                                  complex(np.ravel(sign * sa * np.ones_like(d))[np.argmin(np.ravel(d))]), "phi")
    val, spread = ladder_limit(lambda e: phi_regulated(x, s, e, params), eps)
    if np.ndim(val) == 0:
        val, spread = complex(val), float(spread)
    return (val, spread) if with_spread else val


@dataclass(frozen=True)
class KashaevEigenfunction:
    """``phi(., s)`` with its eigenvalue ``Z + 1/Z = 2 cosh(2 pi s / b)``."""

    s: float
    params: ModularParams = ModularParams()
    eps: float | None = None

    def __post_init__(self):
        if isinstance(self.s, complex) or not np.isreal(self.s):
            raise DomainViolation("spectral parameter s must be real")
        object.__setattr__(self, "s", float(self.s))

    def __call__(self, x):
        return phi(x, self.s, self.eps, self.params)

    @property
    def Z(self) -> float:
        return float(np.exp(-1j * PI * self.s / self.params.omega).real)

    @property
    def eigenvalue(self) -> float:
        return self.Z + 1.0 / self.Z


def length_operator_residual(x, s: float, params: ModularParams | None = None, eps: float | None = None) -> float:
    """
    Residual of ``(v + u + u^-1) phi = (Z + 1/Z) phi`` at the points ``x``.

    Each residual is divided by the sum of the moduli of the four terms, so
    that growth of ``u^{+-1}`` does not masquerade as error.
    """
    params = params or ModularParams()
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    ef = KashaevEigenfunction(s, params, eps)
    u = np.exp(-1j * PI * x / params.omega)
    p0 = ef(x)
    terms = [ef(x + 2 * params.omega_prime), u * p0, p0 / u, -ef.eigenvalue * p0]
    scale = sum(np.abs(t) for t in terms)
    return float(np.max(np.abs(sum(terms)) / scale))


# --------------------------------------------------------------------------- #
#  measure
# --------------------------------------------------------------------------- #
def rho(s, params: ModularParams | None = None):
    """``rho(s) = 4 sinh(2 pi s / b) sinh(2 pi s b)``."""
    params = params or ModularParams()
    s = np.asarray(s, dtype=float)
    return 4 * np.sinh(2 * PI * s / params.b) * np.sinh(2 * PI * s * params.b)


def rho_sine(s, params: ModularParams | None = None):
    """``-4 sin(pi s / w) sin(pi s / w')``, evaluated in complex arithmetic."""
    params = params or ModularParams()
    s = np.asarray(s, dtype=complex)
    return -4 * np.sin(PI * s / params.omega) * np.sin(PI * s / params.omega_prime)


def rho_exp(s, params: ModularParams | None = None):
    """``(e^{i pi s/w} - e^{-i pi s/w})(e^{i pi s/w'} - e^{-i pi s/w'})``."""
    params = params or ModularParams()
    s = np.asarray(s, dtype=complex)
    a, b = PI * s / params.omega, PI * s / params.omega_prime
    return (np.exp(1j * a) - np.exp(-1j * a)) * (np.exp(1j * b) - np.exp(-1j * b))


def jost_M(s, params: ModularParams | None = None):
    """``M(s) = c exp(-2 i pi s^2 - 2 i pi s w'') gamma(2 s + w'')``; ``M(0) = 0``."""
    params = params or ModularParams()
    s = np.asarray(s, dtype=complex)
    zero = np.abs(2 * s) < params.exclusion_radius
    arg = np.where(zero, 1.0, 2 * s + params.omega_dprime)
    val = params.c * np.exp(-2j * PI * s * s - 2j * PI * s * params.omega_dprime) * gamma_array(arg, params, "M")
    return np.where(zero, 0.0, val)


def log_jost_M(s, params: ModularParams):
    s = np.asarray(s, dtype=complex)
    return (np.log(params.c) - 2j * PI * s * s - 2j * PI * s * params.omega_dprime
            + _lg(2 * s + params.omega_dprime, params, "M"))


def reflection_S(s, params: ModularParams | None = None):
    """``S(s) = M(s) / M(-s)``, with the limit ``S(0) = -1``."""
    params = params or ModularParams()
    s = np.asarray(s, dtype=complex)
    zero = np.abs(2 * s) < params.exclusion_radius
    t = np.where(zero, 1.0, s)
    val = jost_M(t, params) / jost_M(-t, params)
    return np.where(zero, -1.0, val)


def sigma(s, params: ModularParams | None = None):
    """``sigma(s) = exp(-4 pi i s w'') - exp(-4 pi i s (w'' - 2 w'))``; ``sigma(s) + sigma(-s) = rho(s)``."""
    params = params or ModularParams()
    s = np.asarray(s, dtype=complex)
    w2, wp = params.omega_dprime, params.omega_prime
    return np.exp(-4j * PI * s * w2) - np.exp(-4j * PI * s * (w2 - 2 * wp))


@dataclass
class SpectralMeasure:
    """Closed forms of the measure at ``s``; all fields broadcast with ``s``."""

    s: np.ndarray
    rho: np.ndarray
    rho_sine: np.ndarray
    rho_exp: np.ndarray
    rho_product: np.ndarray
    M: np.ndarray
    M_reflected: np.ndarray
    S: np.ndarray
    sigma_sum: np.ndarray

    def closed_form_residual(self) -> float:
        """Largest disagreement among the four expressions for ``rho``, relative to ``max(1, rho)``."""
        scale = np.maximum(1.0, np.abs(self.rho))
        d = [np.abs(v - self.rho) / scale for v in (self.rho_sine, self.rho_exp, self.rho_product, self.sigma_sum)]
        return float(np.max(d))

    def unitarity_residual(self) -> float:
        """``max ||S(s)| - 1|`` together with ``|conj M(s) - M(-s)|``."""
        a = np.abs(np.abs(self.S) - 1)
        b = np.abs(np.conj(self.M) - self.M_reflected) / np.maximum(1.0, np.abs(self.M))
        return float(max(np.max(a), np.max(b)))


def measure(s, params: ModularParams | None = None) -> SpectralMeasure:
    """``rho``, ``M``, ``S`` and the ``sigma`` split at real ``s``."""
    params = params or ModularParams()
    s = np.asarray(s, dtype=float)
    M, Mr = jost_M(s, params), jost_M(-s, params)
    return SpectralMeasure(
        s=s, rho=rho(s, params), rho_sine=rho_sine(s, params), rho_exp=rho_exp(s, params),
        rho_product=M * Mr, M=M, M_reflected=Mr, S=reflection_S(s, params),
        sigma_sum=sigma(s, params) + sigma(-s, params),
    )


# --------------------------------------------------------------------------- #
#  smearing machinery
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class Window:
    """Unit-norm Gaussian window used for smearing delta identities."""

    center: float
    width: float = DEFAULT_WIDTH

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("window width must be positive")

    def __call__(self, s):
        return gaussian_window(self.center, self.width)(s)

    @property
    def span(self) -> float:
        return _WINDOW_SPAN * self.width


def _gauss_panels(lo: float, hi: float, n_panels: int):
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x[None, :]).ravel(), (half[:, None] * w[None, :]).ravel()


def _s_support(win: Window):
    """Truncated window support kept away from ``s = 0``."""
    h = min(win.span, 0.95 * abs(win.center))
    if h < 6 * win.width:
        raise DomainViolation(f"window at {win.center} of width {win.width} straddles s = 0")
    return win.center - h, win.center + h


def smear_in_s(win: Window, x, params: ModularParams, weight=None, theta: float = _THETA, panels: int = 8):
    """
    ``Phi(x) = int ds win(s) weight(s) phi(x, s)`` at real ``x``.

    The ``s`` line is ``t (1 - i theta sign x)``, which realizes both ``i0``
    prescriptions exactly; ``weight`` must be analytic near the window support.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lo, hi = _s_support(win)
    t, wt = _gauss_panels(lo, hi, panels)
    sg = np.where(x >= 0, 1.0, -1.0)
    rot = 1 - 1j * theta * sg[:, None]
    s = t[None, :] * rot
    vals = win(s) * np.exp(log_phi(x[:, None], s, params))
    if weight is not None:
        vals = vals * weight(s)
    return np.sum(vals * (wt[None, :] * rot), axis=1)


def _x_rule(params: ModularParams, level: int = 5):
    # |phi|^2 decays like exp(-2 pi Q |x|)
    X = 36.0 / (2 * PI * params.Q) + 1.0
    x, w = line_rule(ContourSpec(half_width=X, breakpoints=(0.0,)), level)
    return x.real, w.real


def orthogonality_check(lambda0: float, mu0: float, width: float = DEFAULT_WIDTH,
                        params: ModularParams | None = None, theta: float = _THETA,
                        level: int = 5) -> SmearedDeltaResult:
    """
    Smeared ``int dx conj(phi(x, s)) phi(x, s') = rho(s)^-1 [delta(s - s') + delta(s + s')]``.

    Windows of ``width`` sit at ``lambda0`` (conjugated side, variable ``s``)
    and ``mu0`` (variable ``s'``).
    """
    params = params or ModularParams()
    f, g = Window(lambda0, width), Window(mu0, width)
    lhs, err = _x_pairing(f, g, params, lambda h, x: smear_in_s(h, x, params, theta=theta), level)
    rhs = smeared_s_rhs(f, g, lambda s: 1.0 / rho(s, params), lambda s: 1.0 / rho(s, params))
    return SmearedDeltaResult(lhs, rhs, 0.0, err,
                              {"theta": theta, "width": width, "b": params.b,
                               "form": "rho^-1 [δ(s−s′)+δ(s+s′)]"})


def smeared_s_rhs(f: Window, g: Window, direct, reflected) -> complex:
    """
    ``int ds conj(f(s)) [direct(s) g(s) + reflected(s) g(-s)]`` over the
    truncated support of ``f``: the smearing of
    ``direct(s) delta(s - s') + reflected(s) delta(s + s')``.
    """
    lo, hi = _s_support(f)
    t, w = _gauss_panels(lo, hi, 8)
    return complex(np.sum(w * np.conj(f(t)) * (direct(t) * g(t) + reflected(t) * g(-t))))


def _x_pairing(f, g, params, transform, level):
    """``int dx conj(T f) T g`` over real ``x`` with a one-level-coarser error estimate."""
    vals = []
    for lv in (level - 1, level):
        x, wx = _x_rule(params, lv)
        vals.append(complex(np.sum(wx * np.conj(transform(f, x)) * transform(g, x))))
    return vals[1], abs(vals[1] - vals[0])


def _y_line(win: Window, eta: float, panels: int):
    t, w = _gauss_panels(win.center - win.span, win.center + win.span, panels)
    return t + 1j * eta, w


def smear_in_x(win: Window, s, params: ModularParams, eps: float = 0.0, eta: float | None = None,
               panels: int = 6, extra=None, shift: float = 0.0, with_M: bool = True):
    """
    ``F(s) = int dy win(y) extra(y) M(s) phi(y - shift, s)``.

    The ``y`` line sits at height ``eta > 0``; ``phi(., s)`` is analytic in the
    upper half plane, so the result equals the real-line integral for any
    ``eps >= 0``. With ``with_M = False`` the factor ``M(s)`` is omitted.
    """
    eta = min(_ETA, 2 * win.width) if eta is None else eta
    if not eta > eps:
        raise DomainViolation("the lifted line must stay above the regulated poles")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    y, wy = _y_line(win, eta, panels)
    logk = log_phi(y[:, None] - shift, s[None, :], params, eps)
    if with_M:
        logk = logk + log_jost_M(s, params)[None, :]
    vals = np.exp(logk) * (wy * win(y))[:, None]
    if extra is not None:
        vals = vals * extra(y)[:, None]
    return vals.sum(axis=0)


def u_transform(win: Window, s, params: ModularParams | None = None, panels: int = 6):
    """``[U f](s) = int dx M(s) phi(x, s) f(x)`` for a Gaussian window ``f``."""
    return smear_in_x(win, s, params or ModularParams(), panels=panels)


def _s_rule(width: float, symmetric: bool = False):
    # the pairing of two smeared transforms decays like exp(-8 pi^2 width^2 s^2)
    smax = math.sqrt(36.0 / (8 * PI * PI)) / width + 1.0
    n = max(4, int(math.ceil(smax)))
    return _gauss_panels(-smax if symmetric else 0.0, smax, 2 * n if symmetric else n)


def completeness_check(x0: float, y0: float, width: float = DEFAULT_WIDTH,
                       params: ModularParams | None = None, ladder: RegulatorLadder | None = None,
                       panels: int = 6) -> SmearedDeltaResult:
    """
    Smeared ``int_0^inf ds rho(s) conj(phi(x, s)) phi(y, s) = delta(x - y)``.

    ``rho conj(phi) phi`` is evaluated as ``conj(M phi) (M phi)``, which keeps
    the exponential growth of ``rho`` and the decay of ``phi`` together. The
    ``i0`` regulator runs along ``ladder`` and is extrapolated to zero; the
    halved ladder gives the stability figure. The same pairing is recomputed
    on the full line with the split weight ``sigma(s)`` for comparison.
    """
    params = params or ModularParams()
    ladder = ladder or DEFAULT_LADDER
    f, g = Window(x0, width), Window(y0, width)
    s, ws = _s_rule(width)

    def pairing(eps, n=panels):
        Ff = smear_in_x(f, s, params, eps, panels=n)
        Fg = smear_in_x(g, s, params, eps, panels=n)
        return complex(np.sum(ws * np.conj(Ff) * Fg))

    eps_all = sorted(set(ladder.eps_values) | set(ladder.halved().eps_values), reverse=True)
    vals = {e: pairing(e) for e in eps_all}
    full = [vals[e] for e in ladder.eps_values]
    half = [vals[e] for e in ladder.halved().eps_values]
    lhs = extrapolate_to_zero(ladder.eps_values, full)
    lhs_half = extrapolate_to_zero(ladder.halved().eps_values, half)
    spread = abs(lhs - extrapolate_to_zero(ladder.eps_values[1:], full[1:]))
    coarse = pairing(ladder.eps_values[-1], panels - 2)
    # sigma split on the whole line
    st, wst = _s_rule(width, symmetric=True)
    Xf = smear_in_x(f, st, params, with_M=False, panels=panels)
    Xg = smear_in_x(g, st, params, with_M=False, panels=panels)
    split = complex(np.sum(wst * sigma(st, params) * np.conj(Xf) * Xg))
    rhs = _pair_on(f, g)
    return SmearedDeltaResult(
        lhs, rhs, 0.0, abs(coarse - vals[ladder.eps_values[-1]]),
        {"ladder": ladder.to_dict(), "ladder_values": full, "ladder_spread": spread,
         "halving_change": abs(lhs_half - lhs), "sigma_split": split,
         "sigma_split_residual": abs(split - lhs), "width": width, "b": params.b},
    )


def reflection_residual(win: Window | None = None, s_samples=None, params: ModularParams | None = None,
                        panels: int = 6) -> float:
    """``max |F(s) - S(s) F(-s)|`` for ``F = U f``, both sides by separate quadratures."""
    params = params or ModularParams()
    win = win or Window(0.1, 0.2)
    s = np.asarray(np.linspace(0.15, 1.5, 10) if s_samples is None else s_samples, dtype=float)
    Fp = u_transform(win, s, params, panels)
    Fm = u_transform(win, -s, params, panels)
    return float(np.max(np.abs(Fp - reflection_S(s, params) * Fm)))


# --------------------------------------------------------------------------- #
#  projection P(s, s') = (delta(s - s') + S(s) delta(s + s')) / 2
# --------------------------------------------------------------------------- #
def apply_projection(F, params: ModularParams | None = None):
    """``[P F](s) = (F(s) + S(s) F(-s)) / 2`` as a callable."""
    params = params or ModularParams()

    def PF(s):
        s = np.asarray(s, dtype=float)
        return 0.5 * (F(s) + reflection_S(s, params) * F(-s))

    return PF


def _pair_on(win: Window, F):
    """``int ds conj(win(s)) F(s)`` over the window support."""
    t, w = _gauss_panels(win.center - win.span, win.center + win.span, 8)
    return complex(np.sum(w * np.conj(win(t)) * F(t)))


def projection_kernel(s: float, s_prime: float, params: ModularParams | None = None,
                      width: float = DEFAULT_WIDTH) -> complex:
    """Smeared ``<w_s, P w_s'>`` with unit Gaussian windows of ``width`` at ``s`` and ``s'``."""
    params = params or ModularParams()
    return _pair_on(Window(s, width), apply_projection(Window(s_prime, width), params))


def projection_checks(center: float = 0.4, width: float = DEFAULT_WIDTH,
                      params: ModularParams | None = None) -> dict:
    """
    Smeared idempotence, identity on the ``U`` image and the reflection
    constraint ``G(s) = S(s) G(-s)`` of ``G = P w``.
    """
    params = params or ModularParams()
    w = Window(center, width)
    out = {}
    P1 = apply_projection(w, params)
    P2 = apply_projection(P1, params)
    out["idempotence"] = max(abs(_pair_on(v, P2) - _pair_on(v, P1)) for v in (w, Window(-center, width)))
    src = Window(0.1, 0.2)
    F = lambda s: u_transform(src, s, params)
    PF = apply_projection(F, params)
    probe = Window(center, 0.2)
    out["identity_on_image"] = abs(_pair_on(probe, PF) - _pair_on(probe, F))
    s = np.linspace(0.1, 1.0, 10)
    out["reflection_constraint"] = float(np.max(np.abs(P1(s) - reflection_S(s, params) * P1(-s))))
    return out


def appendix_gamma_ratio_identity(z: complex, params: ModularParams | None = None) -> float:
    """
    ``|gamma(z + w - w') gamma(z - w + w') - gamma(z + w'') gamma(z - w'')|``.

    At ``z = 0`` the right side is a zero times a pole; near it the product is
    evaluated as the mean over a small circle, which is exact for the analytic
    continuation.
    """
    params = params or ModularParams()
    w, wp, w2 = params.omega, params.omega_prime, params.omega_dprime
    z = complex(z)
    lhs = complex(np.prod(gamma_array(np.array([z + w - wp, z - w + wp]), params, "gamma ratio")))
    if abs(z) < 1e-3:
        zs = z + 1e-2 * np.exp(2j * PI * np.arange(16) / 16)
        rhs = complex(np.mean(gamma_array(zs + w2, params) * gamma_array(zs - w2, params)))
    else:
        rhs = complex(np.prod(gamma_array(np.array([z + w2, z - w2]), params, "gamma ratio")))
    return abs(lhs - rhs)
