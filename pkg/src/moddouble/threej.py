"""
The 3j-symbol kernel ``S(x1, x2, x3)`` of the modular double, its
normalization, undressed form and momentum representation.

    S = S0 exp(-2 pi i (s1 x23 + s2 x31 + s3 x21))
        * gamma(x12 - s1) / gamma(x12 + s2 + s3 + w'')
        * gamma(x23 + s3 - s2 - w'') / gamma(x23 - s1)
        * gamma(x31 - w'') / gamma(x31 + s1 - s2 - s3)

with every ``w''`` in a gamma argument read as ``w'' - i0``. The ``i0`` is
realized by a small ``eps`` and the values returned are the limit of the
three-point ladder ``eps, eps/2, eps/4``; contour integrals realize it exactly
by passing on the correct side of the pinching poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .casimir_undressing import UndressingChain, casimir_word, eigenfunction_Psi_p
from .errors import DomainViolation
from .kashaev_spectral import (
    DEFAULT_LADDER, DEFAULT_WIDTH, Window, _pair_on, _s_rule, _x_pairing, default_eps, phi, rho, smear_in_s,
    smear_in_x, smeared_s_rhs,
)
from .qdilog import ModularParams, gamma_array
from .quadrature import (
    EndDecay, RegulatorLadder, SmearedDeltaResult, extrapolate_to_zero, integrate_line, ladder_limit,
    separating_contour,
)
from .reports import ResidualReport
from .weyl_rep import OpExpr, coproduct_generator, evaluate, generator, v_op

PI = math.pi
_MARGIN = 0.12


# --------------------------------------------------------------------------- #
#  data
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class SpinTriple:
    """Real spins ``(s1, s2, s3)``."""

    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        for name in ("s1", "s2", "s3"):
            v = getattr(self, name)
            if isinstance(v, complex) or not np.isreal(v):
                raise DomainViolation(f"spin {name} = {v} must be real")
            object.__setattr__(self, name, float(np.real(v)))

    def __iter__(self):
        return iter((self.s1, self.s2, self.s3))

    def Z(self, params: ModularParams, dual: bool = False):
        w = params.omega_prime if dual else params.omega
        return tuple(complex(np.exp(-1j * PI * s / w)) for s in self)


def _triple(spins) -> SpinTriple:
    return spins if isinstance(spins, SpinTriple) else SpinTriple(*spins)


def canonical_S0(spins, params: ModularParams | None = None) -> complex:
    """
    ``S0 = exp(-i pi / 4) exp(-i pi w''^2)
    exp(i pi s3^2 + 2 pi i s3 (s2 + w'') + i pi (s2 - s1 + s3)^2) gamma(s2 - s1 - s3)``.

    With this choice ``S_p = gamma(p - s3) Psi_p`` and ``S0 exp(-2 pi i s3 w'')``
    has unit modulus.
    """
    params = params or ModularParams()
    s1, s2, s3 = _triple(spins)
    w2 = params.omega_dprime
    g = complex(gamma_array(np.array([s2 - s1 - s3], complex), params, "S0")[0])
    return complex(np.exp(-1j * PI / 4) * np.exp(-1j * PI * w2 ** 2)
                   * np.exp(1j * PI * s3 ** 2 + 2j * PI * s3 * (s2 + w2) + 1j * PI * (s2 - s1 + s3) ** 2) * g)


@dataclass(frozen=True)
class KernelSpec:
    """
    Spins, normalization and regulator of a 3j kernel.

    ``S0 = None`` with ``canonical = True`` selects :func:`canonical_S0`;
    ``eps = None`` selects ``1e-4 |Im w''|``.
    """

    spins: SpinTriple
    params: ModularParams = field(default_factory=ModularParams)
    S0: complex | None = None
    eps: float | None = None
    canonical: bool = True

    def __post_init__(self):
        object.__setattr__(self, "spins", _triple(self.spins))
        if self.eps is not None and not self.eps > 0:
            raise DomainViolation("eps must be positive")

    @property
    def norm(self) -> complex:
        if self.S0 is not None:
            return complex(self.S0)
        return canonical_S0(self.spins, self.params) if self.canonical else 1.0

    @property
    def regulator(self) -> float:
        return default_eps(self.params) if self.eps is None else float(self.eps)


# --------------------------------------------------------------------------- #
#  kernels
# --------------------------------------------------------------------------- #
def _g(z, params, factor):
    return gamma_array(np.asarray(z, dtype=complex), params, factor)


def kernel_S_regulated(spec: KernelSpec, x1, x2, x3, eps: float):
    """The kernel with ``w''`` replaced by ``w'' - i eps`` in every gamma argument."""
    s1, s2, s3 = spec.spins
    p = spec.params
    W = p.omega_dprime - 1j * eps
    x1, x2, x3 = (np.asarray(x, dtype=complex) for x in (x1, x2, x3))
    x12, x23, x31 = x1 - x2, x2 - x3, x3 - x1
    return (spec.norm * np.exp(-2j * PI * (s1 * x23 + s2 * x31 - s3 * x12))
            * _g(x12 - s1, p, "gamma(x12 - s1)") / _g(x12 + s2 + s3 + W, p, "gamma(x12 + s2 + s3 + w'')")
            * _g(x23 + s3 - s2 - W, p, "gamma(x23 + s3 - s2 - w'')") / _g(x23 - s1, p, "gamma(x23 - s1)")
            * _g(x31 - W, p, "gamma(x31 - w'')") / _g(x31 + s1 - s2 - s3, p, "gamma(x31 + s1 - s2 - s3)"))


def _limit(family, eps, with_spread):
    val, spread = ladder_limit(family, eps)
    if val.ndim == 0:
        val, spread = complex(val), float(spread)
    return (val, spread) if with_spread else val


def kernel_S(spec: KernelSpec, x1, x2, x3, with_spread: bool = False):
    """
    ``S(x1, x2, x3)`` as the ``eps -> 0`` limit of the regulated kernel.

    Raises
    ------
    NearSingularity
        Naming the offending gamma factor.
    """
    return _limit(lambda e: kernel_S_regulated(spec, x1, x2, x3, e), spec.regulator, with_spread)


def undressed_kernel_regulated(spec: KernelSpec, x1, x2, x3, eps: float):
    s1, s2, s3 = spec.spins
    p = spec.params
    w2 = p.omega_dprime
    W = w2 - 1j * eps
    x1, x2, x3 = (np.asarray(x, dtype=complex) for x in (x1, x2, x3))
    x12, x13, x23 = x1 - x2, x1 - x3, x2 - x3
    const = (spec.norm * np.exp(1j * PI * w2 ** 2) * np.exp(-1j * PI * (s2 - s1 + s3) ** 2)
             / _g(np.array([s2 - s1 - s3]), p, "gamma(s2 - s1 - s3)")[0])
    return (const * np.exp(2j * PI * (s1 + s3) * x12) / _g(x12 + s2 + s3 + W, p, "gamma(x12 + s2 + s3 + w'')")
            * np.exp(2j * PI * (w2 - s3) * x13) * _g(x23 + s3 - s2 - W, p, "gamma(x23 + s3 - s2 - w'')")
            / _g(x13 + W, p, "gamma(x13 + w'')"))


def undressed_kernel(spec: KernelSpec, x1, x2, x3, with_spread: bool = False):
    """
    Closed form of ``A^-1 S`` in ``(x1, x2)``:

    ``S0 e^{i pi w''^2} e^{-i pi (s2 - s1 + s3)^2} / gamma(s2 - s1 - s3)
    * e^{2 pi i (s1 + s3) x12} / gamma(x12 + s2 + s3 + w'')
    * e^{2 pi i (w'' - s3) x13} gamma(x23 + s3 - s2 - w'') / gamma(x13 + w'')``.
    """
    return _limit(lambda e: undressed_kernel_regulated(spec, x1, x2, x3, e), spec.regulator, with_spread)


def Z_factor(spins, p: float, params: ModularParams | None = None) -> complex:
    """``Z(s1, s2 | s3, p) = gamma(p - s3)`` for the canonical normalization."""
    params = params or ModularParams()
    return complex(_g(np.array([p - _triple(spins).s3]), params, "gamma(p - s3)")[0])


def momentum_kernel_Sp(spins, p: float, x1, x2, params: ModularParams | None = None, eps: float | None = None):
    """
    ``S_p(x1, x2) = gamma(p - s3) e^{-2 pi i p x1} e^{-2 pi i s1 x21}
    phi(x21 - s2, s3) / gamma(x21 - s2 + p)``.

    Raises
    ------
    DomainViolation
        For complex ``p``.
    """
    params = params or ModularParams()
    if np.iscomplexobj(p) and np.imag(p) != 0:
        raise DomainViolation("momentum p must be real")
    p = float(np.real(p))
    s1, s2, s3 = _triple(spins)
    x1 = np.asarray(x1, dtype=complex)
    x21 = np.asarray(x2, dtype=complex) - x1
    out = (Z_factor(spins, p, params) * np.exp(-2j * PI * p * x1) * np.exp(-2j * PI * s1 * x21)
           * phi(x21 - s2, s3, eps, params) / _g(x21 - s2 + p, params, "gamma(x21 - s2 + p)"))
    return complex(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------- #
#  the defining system
# --------------------------------------------------------------------------- #
def system_words(spins, params: ModularParams | None = None, dual: bool = False) -> dict:
    """
    ``{name: word}`` with ``word S = 0`` encoding ``e12 S = e3' S``,
    ``f12 S = f3' S`` and ``K12 S = K3' S`` on three variables.
    """
    params = params or ModularParams()
    s1, s2, s3 = _triple(spins)
    out = {}
    for name, kind, primed in (("S1", "e_small", "e_primed"), ("S2", "f_small", "f_primed"),
                               ("S3", "K", "K_primed")):
        lhs = coproduct_generator(kind, s1, s2, params, dual=dual)
        rhs = generator(primed, s3, params, var=2, dual=dual)
        out[name + ("~" if dual else "")] = lhs - rhs
    return out


def default_points(n: int = 10, seed: int = 7) -> np.ndarray:
    """``n`` generic real points in ``[-1, 1]^3``."""
    return np.random.default_rng(seed).uniform(-1.0, 1.0, (n, 3))


def verify_system(spec: KernelSpec, sample_points=None) -> ResidualReport:
    """
    Residuals of the defining system and of its modular dual at
    ``sample_points``. Each residual is ``|sum of terms|`` over ``sum |terms|``,
    maximized over points.
    """
    p = spec.params
    pts = np.asarray(default_points() if sample_points is None else sample_points, dtype=complex)
    func = lambda a, b, c: kernel_S(spec, a, b, c)
    details = {}
    for dual in (False, True):
        for name, word in system_words(spec.spins, p, dual).items():
            val, scale = evaluate(word, func, pts, with_scale=True)
            details[name] = float(np.max(np.abs(val) / scale))
    worst = max(details.values())
    return ResidualReport(
        identity_id="System", tag="System",
        parameters={"spins": list(spec.spins), "b": p.b, "eps": spec.regulator, "npoints": len(pts)},
        abs_residual=worst, rel_residual=worst, details=details, metric="rel",
        condition="kernel as the limit of the eps ladder (eps, eps/2, eps/4)",
    )


def casimir_eigen_residual(spec: KernelSpec, sample_points=None) -> float:
    """``max |C12 S - (Z3 + Z3^-1) S| / sum |terms|`` with ``x3`` as a parameter."""
    p = spec.params
    s1, s2, s3 = spec.spins
    pts = np.asarray(default_points() if sample_points is None else sample_points, dtype=complex)
    Z3 = spec.spins.Z(p)[2]
    word = casimir_word(s1, s2, p) - (Z3 + 1 / Z3) * OpExpr.identity()
    worst = 0.0
    for x1, x2, x3 in pts:
        val, scale = evaluate(word, lambda a, b: kernel_S(spec, a, b, np.full(np.shape(a), x3)),
                              np.array([[x1, x2]]), with_scale=True)
        worst = max(worst, float(np.max(np.abs(val) / scale)))
    return worst


def kernel_translation_residual(spec: KernelSpec, sample_points=None, dual: bool = False) -> float:
    """``max |v1 v2 v3 S / S - 1|``, with the dual shifts when ``dual`` is set."""
    p = spec.params
    pts = np.asarray(default_points() if sample_points is None else sample_points, dtype=complex)
    word = v_op(p, 0, dual=dual) * v_op(p, 1, dual=dual) * v_op(p, 2, dual=dual)
    func = lambda a, b, c: kernel_S(spec, a, b, c)
    return float(np.max(np.abs(evaluate(word, func, pts) / func(*pts.T) - 1)))


def undressed_translation_residual(spec: KernelSpec, sample_points=None) -> float:
    """``max |v1 v2 v3 U / U - 1|``: the undressed kernel is invariant under joint shifts by ``2 w'``."""
    p = spec.params
    pts = np.asarray(default_points() if sample_points is None else sample_points, dtype=complex)
    word = v_op(p, 0) * v_op(p, 1) * v_op(p, 2)
    func = lambda a, b, c: undressed_kernel(spec, a, b, c)
    return float(np.max(np.abs(evaluate(word, func, pts) / func(*pts.T) - 1)))


# --------------------------------------------------------------------------- #
#  quadrature oracles
# --------------------------------------------------------------------------- #
def undressed_by_quadrature(spec: KernelSpec, x1: float, x2: float, x3: float):
    """
    ``A^-1 S`` at a real point by the kernel integral of ``A^-1`` in ``t`` with
    the unregulated ``S(x1, t, x3)``; the contour passes above the poles
    coming from ``w'' - i0`` and below those of ``gamma(x2 - t - w'' + i0)``.

    Returns
    -------
    value, error_estimate
    """
    s1, s2, s3 = spec.spins
    p = spec.params
    w2 = p.omega_dprime
    lower = [(x1 + s2 + s3, 0.0), (x3 - s3 + s2, 0.0)]
    upper = [(x3 + s1, p.Q / 2), (x2, 0.0)]
    contour = separating_contour(lower=lower, upper=upper, plus=EndDecay(x1 - x2 + 2 * s2 - s1 + w2, 0.0),
                                 minus=EndDecay(-2 * w2, 0.0), margin=_MARGIN, target_rel_tol=1e-11)

    def integrand(t):
        # gamma(x1 - t - s1) in S cancels the denominator of the A^-1 kernel
        return (np.exp(2j * PI * (w2 - s2) * (x2 - t)) * _g(x2 - t - w2, p, "Akern")
                / _g(x1 - t - s1, p, "Akern") * kernel_S_regulated(spec, x1, t, x3, 0.0))

    val, err = integrate_line(integrand, contour)
    pref = p.c / complex(_g(np.array([x1 - x2 - s1 + 2 * s2]), p, "Akern")[0])
    return pref * val, abs(pref) * err


def momentum_by_quadrature(spec: KernelSpec, p_mom: float, x1: float, x2: float):
    """``int dx3 e^{-2 pi i p x3} U(x1, x2, x3)`` on a contour separating the ``i0`` poles."""
    s1, s2, s3 = spec.spins
    p = spec.params
    w2 = p.omega_dprime
    contour = separating_contour(lower=[(x1, 0.0)], upper=[(x2 + s3 - s2, 0.0)],
                                 plus=EndDecay(x1 - x2 + s2 - p_mom + w2, 0.0),
                                 minus=EndDecay(s3 - p_mom - w2, 0.0), margin=_MARGIN, target_rel_tol=1e-11)
    val, err = integrate_line(
        lambda t: np.exp(-2j * PI * p_mom * t) * undressed_kernel_regulated(spec, x1, x2, t, 0.0), contour)
    return val, err


def undressed_oracle_report(spec: KernelSpec, points=None) -> ResidualReport:
    """Closed-form undressed kernel against the quadrature of ``A^-1 S``."""
    pts = np.asarray([(0.1, -0.2, 0.4), (0.3, 0.25, -0.1)] if points is None else points, dtype=float)
    res, qerr = [], []
    for x1, x2, x3 in pts:
        num, err = undressed_by_quadrature(spec, x1, x2, x3)
        ref = undressed_kernel(spec, x1, x2, x3)
        res.append(abs(num - ref) / abs(ref))
        qerr.append(err / abs(ref))
    return ResidualReport(
        identity_id="Akern", tag="Akern", parameters={"spins": list(spec.spins), "b": spec.params.b},
        rel_residual=max(res), quadrature_error=max(qerr), details={f"point{i}": r for i, r in enumerate(res)}, metric="rel",
        condition="t contour separating the i0 poles",
    )


def verify_momentum_consistency(spins, p_mom: float, sample=None, params: ModularParams | None = None) -> ResidualReport:
    """
    At each ``(x1, x2)`` in ``sample``: the closed form ``S_p`` against the
    Fourier quadrature of the undressed kernel (``fourier``) and against
    ``gamma(p - s3) Psi_p`` (``factorized``), both with the canonical ``S0``.

    Raises
    ------
    DomainViolation
        When the ends of the ``x3`` contour cannot be made decaying.
    """
    params = params or ModularParams()
    spec = KernelSpec(_triple(spins), params)
    pts = np.asarray([(0.1, -0.25), (0.3, 0.2)] if sample is None else sample, dtype=float)
    s1, s2, s3 = spec.spins
    four, fact, qerr = [], [], []
    for x1, x2 in pts:
        closed = momentum_kernel_Sp(spec.spins, p_mom, x1, x2, params)
        num, err = momentum_by_quadrature(spec, p_mom, x1, x2)
        four.append(abs(num - closed) / abs(closed))
        qerr.append(err / abs(closed))
        psi = eigenfunction_Psi_p(s1, s2, s3, p_mom, x1, x2, params)
        fact.append(abs(closed - Z_factor(spec.spins, p_mom, params) * psi) / abs(closed))
    return ResidualReport(
        identity_id="Sp", tag="Sp", parameters={"spins": list(spec.spins), "p": p_mom, "b": params.b},
        rel_residual=max(four), quadrature_error=max(qerr),
        details={"fourier": max(four), "factorized": max(fact)}, metric="rel",
        condition="x3 contour separating the i0 poles",
    )


def normalization_residual(spins, params: ModularParams | None = None) -> float:
    """``||S0 e^{-2 pi i s3 w''}| - 1|`` for the canonical ``S0``."""
    params = params or ModularParams()
    S0 = canonical_S0(spins, params)
    return abs(abs(S0 * np.exp(-2j * PI * _triple(spins).s3 * params.omega_dprime)) - 1)


# --------------------------------------------------------------------------- #
#  orthogonality and completeness of S_p
# --------------------------------------------------------------------------- #
def sp_orthogonality_check(p_mom: float, lambda0: float, mu0: float, width: float = DEFAULT_WIDTH,
                           params: ModularParams | None = None, level: int = 5) -> SmearedDeltaResult:
    """
    Smeared orthogonality of ``S_p`` in ``s3`` at equal momenta.

    The plane wave in ``x1`` produces ``delta(p - q)`` exactly and the
    ``x21`` factors other than ``phi`` are unimodular, so the pairing reduces to

        int dx conj(Phi_f(x)) Phi_g(x),   Phi_h(x) = int ds h(s) gamma(p - s) phi(x, s),

    to be compared with the smearing of
    ``rho(s)^-1 [delta(s - s') + delta(s + s') gamma(p - s) / gamma(p + s)]``.
    Window ``f`` at ``lambda0`` is on the conjugated side.
    """
    params = params or ModularParams()
    f, g = Window(lambda0, width), Window(mu0, width)
    weight = lambda s: _g(p_mom - s, params, "gamma(p - s)")
    lhs, err = _x_pairing(f, g, params, lambda h, x: smear_in_s(h, x, params, weight=weight), level)
    # in the variable of f the reflected term carries gamma(p + s) / gamma(p - s)
    reflected = lambda s: _g(p_mom + s, params, "gamma(p + s)") / (_g(p_mom - s, params, "gamma(p - s)")
                                                                   * rho(s, params))
    rhs = smeared_s_rhs(f, g, lambda s: 1.0 / rho(s, params), reflected)
    return SmearedDeltaResult(lhs, rhs, 0.0, err,
                              {"p": p_mom, "width": width, "b": params.b,
                               "form": "rho^-1 [δ(s−s′)+δ(s+s′) γ(p−s)/γ(p+s)]"})


def sp_completeness_check(spins, p_mom: float, x0: float, y0: float, width: float = DEFAULT_WIDTH,
                          params: ModularParams | None = None, ladder: RegulatorLadder | None = None,
                          panels: int = 6) -> SmearedDeltaResult:
    """
    Smeared completeness of ``S_p`` at fixed momentum.

    For windows ``a(x1) b(x21)`` the ``x1`` integral yields the Fourier
    transform of ``a`` at ``p``, so completeness over ``(p, s3)`` holds if for
    every ``p``

        int_0^inf ds rho(s) conj(B'(s)) B(s) = int dx conj(b'(x)) b(x),
        B(s) = int dx b(x) E_p(x) gamma(p - s) phi(x - s2, s),

    with ``E_p(x) = e^{-2 pi i s1 x} / gamma(x - s2 + p)``. Window ``b'`` sits
    at ``x0`` and ``b`` at ``y0``.
    """
    params = params or ModularParams()
    ladder = ladder or DEFAULT_LADDER
    s1, s2, _ = _triple(spins)
    f, g = Window(x0, width), Window(y0, width)
    s, ws = _s_rule(width)
    gp = _g(p_mom - s, params, "gamma(p - s)")
    extra = lambda y: np.exp(-2j * PI * s1 * y) / _g(y - s2 + p_mom, params, "E_p")

    def pairing(eps, n=panels):
        Bf = gp * smear_in_x(f, s, params, eps, panels=n, extra=extra, shift=s2)
        Bg = gp * smear_in_x(g, s, params, eps, panels=n, extra=extra, shift=s2)
        return complex(np.sum(ws * np.conj(Bf) * Bg))

    vals = [pairing(e) for e in ladder.eps_values]
    lhs = extrapolate_to_zero(ladder.eps_values, vals)
    spread = abs(lhs - extrapolate_to_zero(ladder.eps_values[1:], vals[1:]))
    coarse = pairing(ladder.eps_values[-1], panels - 2)
    rhs = _pair_on(f, g)
    return SmearedDeltaResult(
        lhs, rhs, 0.0, abs(coarse - vals[-1]),
        {"p": p_mom, "ladder": ladder.to_dict(), "ladder_values": vals, "ladder_spread": spread,
         "width": width, "b": params.b},
    )


def chain_for(spec: KernelSpec) -> UndressingChain:
    s1, s2, _ = spec.spins
    return UndressingChain(s1, s2, spec.params)
