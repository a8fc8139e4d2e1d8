"""
Casimir operator of the tensor product and its undressing.

``C12 = f12 e12 - q K12 - q^-1 K12^-1`` acts on functions of ``(x1, x2)`` by
shifts and exponential multiplications. Three unitary conjugations reduce it
to the separable form

    Ct = Z2 u1/u2 + Z2^-1 u2/u1 + Z1 v2 + Z1/(q Z2) (u2/u1) v1^-1,

namely

    R1 = gamma(x12 - s1)               (multiplication)
    R2 = F2^-1 gamma(k + s2) F2        (Fourier sandwich in x2)
    R3 = gamma(x12 + 2 s2 - s1)        (multiplication)

and ``A = R1 R2 R3``. The inverse acts by the kernel

    [A^-1 f](x1, x2) = c / gamma(x12 - s1 + 2 s2)
        * int dt exp(2 pi i (w'' - s2)(x2 - t)) gamma(x2 - t - w'' + i0) / gamma(x1 - t - s1) f(x1, t).

Each conjugation is checked multiplicatively, ``C R f = R C' f``, so no
integral operator has to be inverted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainViolation
from .intertwiner import fourier_sandwich
from .kashaev_spectral import phi
from .qdilog import ModularParams, gamma_array
from .quadrature import integrate_line, separating_contour
from .reports import ResidualReport
from .weyl_rep import OpExpr, SpinLabel, TestFunction, apply, coproduct_generator, evaluate, u_op, v_op

PI = math.pi
_STRIP = (-0.9, 3.0)  # heights of the R2 Fourier line, first entry in units of Q/2
_MARGIN = 0.12
_LIFT = 2.5  # highest base line of the A^-1 contour
_ABS_TOL = 1e-18  # absolute floor for A^-1 values far in the tails


def _spin(s) -> float:
    return s.s if isinstance(s, SpinLabel) else float(s)


def _Z(s, params):
    return np.exp(-1j * PI * _spin(s) / params.omega)


# --------------------------------------------------------------------------- #
#  two-variable inputs
# --------------------------------------------------------------------------- #
@dataclass
class TwoVarFunction:
    """
    Pointwise-evaluable function of ``(x1, x2)``.

    ``lower(x1)`` and ``upper(x1)`` list the singular half-lines of
    ``t -> func(x1, t)`` as ``(re, top)`` and ``(re, bottom)`` pairs, and
    ``plus(x1)``, ``minus(x1)`` give its asymptotics, for contour placement in
    ``A^-1``. Product Gaussians need none of them.
    """

    func: Callable
    lower: Callable | None = None
    upper: Callable | None = None
    plus: Callable | None = None
    minus: Callable | None = None
    half_width: float = 12.0
    closed: TestFunction | None = None
    alpha: float | None = None

    @classmethod
    def from_testfunction(cls, f: TestFunction) -> "TwoVarFunction":
        if f.nvars != 2:
            raise ValueError("a function of two variables is required")
        alpha = min(t.alpha[1].real for t in f.terms)
        return cls(f, half_width=math.sqrt(44.0 / alpha) + 3.0, closed=f, alpha=alpha)

    @classmethod
    def gaussian_pair(cls, a1=1.0, b1=0.0, a2=0.5, b2=0.3j) -> "TwoVarFunction":
        return cls.from_testfunction(TestFunction.gaussian(a1, b1).tensor(TestFunction.gaussian(a2, b2)))

    def __call__(self, x1, x2):
        return np.asarray(self.func(x1, x2), dtype=complex)


def _as_two_var(f) -> TwoVarFunction:
    if isinstance(f, TwoVarFunction):
        return f
    if isinstance(f, TestFunction):
        return TwoVarFunction.from_testfunction(f)
    return TwoVarFunction(f)


def _points(point):
    pts = np.asarray(point, dtype=complex)
    return pts[None, :] if pts.ndim == 1 else pts


def _unwrap(val, point):
    return complex(val[0]) if np.asarray(point).ndim == 1 else val


# --------------------------------------------------------------------------- #
#  Casimir words
# --------------------------------------------------------------------------- #
def _ops(params):
    u = lambda i, pw=1: u_op(params, i, pw)
    v = lambda i, pw=1: v_op(params, i, pw)
    return u, v, OpExpr.identity()


def casimir_word(s1, s2, params: ModularParams | None = None) -> OpExpr:
    """``f12 e12 - q K12 - q^-1 K12^-1`` from the coproduct."""
    params = params or ModularParams()
    q = params.q
    e12 = coproduct_generator("e_small", s1, s2, params)
    f12 = coproduct_generator("f_small", s1, s2, params)
    K12 = coproduct_generator("K", s1, s2, params)
    K12i = v_op(params, 0, -1) * v_op(params, 1, -1)
    return f12 * e12 - q * K12 - (1 / q) * K12i


def casimir_five_term(s1, s2, params: ModularParams | None = None) -> OpExpr:
    """The explicit form in ``u1/u2``, ``v2``, ``v1^-1`` and ``v1^-1 v2``."""
    params = params or ModularParams()
    q, Z1, Z2 = params.q, _Z(s1, params), _Z(s2, params)
    u, v, I = _ops(params)
    r12, r21 = u(0) * u(1, -1), u(1) * u(0, -1)
    d = I + (q / Z1) * r12
    return (Z2 * r12 + (1 / Z2) * r21 + (Z1 * I + (1 / q) * r21) * d * v(1)
            + (Z2 * I + Z1 / (q * Z2) * r21) * d * v(0, -1)
            + (Z1 / q ** 2) * r21 * d * (I + (q ** 3 / Z1) * r12) * v(0, -1) * v(1))


def casimir_step(step: int, s1, s2, params: ModularParams | None = None) -> OpExpr:
    """
    Casimir after ``step`` conjugations: 0 is ``C12``, 1 is ``C'``, 2 is ``C''``
    and 3 is the separable ``Ct``.
    """
    params = params or ModularParams()
    q, Z1, Z2 = params.q, _Z(s1, params), _Z(s2, params)
    u, v, I = _ops(params)
    r12, r21 = u(0) * u(1, -1), u(1) * u(0, -1)
    if step == 0:
        return casimir_five_term(s1, s2, params)
    if step == 1:
        U2 = u(1) * (I + (1 / q) * Z2 * v(1))
        return Z2 * r12 + Z1 * v(1) + Z2 * v(0, -1) + (1 / Z2) * u(0, -1) * (I + (1 / q) * Z1 * v(0, -1)) * U2
    if step == 2:
        d = I + (q * Z2 ** 2 / Z1) * r12
        return Z2 * r12 + (1 / Z2) * r21 + Z1 * d * v(1) + Z1 / (q * Z2) * r21 * d * v(0, -1)
    if step == 3:
        return Z2 * r12 + (1 / Z2) * r21 + Z1 * v(1) + Z1 / (q * Z2) * r21 * v(0, -1)
    raise ValueError("step must be 0, 1, 2 or 3")


def tilde_casimir(s1, s2, params: ModularParams | None = None) -> OpExpr:
    return casimir_step(3, s1, s2, params)


def casimir_apply(s1, s2, f, point, params: ModularParams | None = None, form: str = "five_term"):
    """
    ``[C12 f](point)`` by shifts and multiplications.

    Parameters
    ----------
    f : TestFunction, TwoVarFunction or callable ``f(x1, x2)``
    point : (x1, x2) or array of shape (n, 2)
    form : {"five_term", "coproduct"}
    """
    params = params or ModularParams()
    word = casimir_five_term(s1, s2, params) if form == "five_term" else casimir_word(s1, s2, params)
    return _unwrap(evaluate(word, _as_two_var(f), _points(point)), point)


def tilde_casimir_apply(s1, s2, f, point, params: ModularParams | None = None):
    """``[Ct f](point)``."""
    params = params or ModularParams()
    return _unwrap(evaluate(tilde_casimir(s1, s2, params), _as_two_var(f), _points(point)), point)


def tilde_casimir_terms(s1, s2, x1, x2, params: ModularParams | None = None):
    """
    ``Ct`` as a list of ``(shift, coefficient)`` at ``(x1, x2)``, built by hand:
    ``[Ct f](x) = sum coefficient * f(x + shift)``.
    """
    params = params or ModularParams()
    q, Z1, Z2 = params.q, _Z(s1, params), _Z(s2, params)
    w, wp = params.omega, params.omega_prime
    r = np.exp(-1j * PI * (x1 - x2) / w)  # u1 / u2
    return [((0.0, 0.0), Z2 * r + 1 / (Z2 * r)),
            ((0.0, 2 * wp), Z1),
            ((-2 * wp, 0.0), Z1 / (q * Z2) / r)]


def substitution_residual(s1, s2, f, points, params: ModularParams | None = None) -> float:
    """
    ``max |V1 V2 f - v1 v2 f| / |v1 v2 f|`` with ``V1 = v1 (1 + q/Z1 u1/u2)^-1``
    and ``V2 = (1 + q/Z1 u1/u2) v2``; the dressing factors meet at the shifted
    point and cancel.
    """
    params = params or ModularParams()
    f = _as_two_var(f)
    pts = _points(points)
    q, Z1 = params.q, _Z(s1, params)
    w, wp = params.omega, params.omega_prime
    d = lambda a, b: 1 + (q / Z1) * np.exp(-1j * PI * (a - b) / w)
    x1, x2 = pts[:, 0] + 2 * wp, pts[:, 1]
    # V1 g (x) = g(x1 + 2w', x2) / d(x1 + 2w', x2), with g = V2 f
    g = d(x1, x2) * f(x1, x2 + 2 * wp)
    lhs = g / d(x1, x2)
    rhs = f(pts[:, 0] + 2 * wp, pts[:, 1] + 2 * wp)
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


# --------------------------------------------------------------------------- #
#  eigenfunctions of the separable Casimir
# --------------------------------------------------------------------------- #
def eigenfunction_Psi_p(s1, s2, s3, p, x1, x2, params: ModularParams | None = None, eps: float | None = None):
    """
    ``Psi_p = exp(-2 pi i p x1) exp(-2 pi i s1 x21) / gamma(x21 + p - s2) phi(x21 - s2, s3)``.

    Raises
    ------
    NearSingularity
    DomainViolation
        For complex ``p``.
    """
    params = params or ModularParams()
    if isinstance(p, complex) and p.imag != 0:
        raise DomainViolation("momentum p must be real")
    s1, s2, s3 = _spin(s1), _spin(s2), _spin(s3)
    x1 = np.asarray(x1, dtype=complex)
    x21 = np.asarray(x2, dtype=complex) - x1
    out = (np.exp(-2j * PI * p * x1) * np.exp(-2j * PI * s1 * x21)
           / gamma_array(x21 + p - s2, params, "Psi_p") * phi(x21 - s2, s3, eps, params))
    return complex(out) if out.ndim == 0 else out


def psi_callable(s1, s2, s3, p, params: ModularParams | None = None, eps: float | None = None):
    return lambda a, b: eigenfunction_Psi_p(s1, s2, s3, p, a, b, params, eps)


# --------------------------------------------------------------------------- #
#  undressing chain
# --------------------------------------------------------------------------- #
class Direction(str, enum.Enum):
    A = "A"
    A_inverse = "A_inverse"


@dataclass(frozen=True)
class UndressingChain:
    """The operators ``R1``, ``R2``, ``R3`` and ``A = R1 R2 R3`` for spins ``s1, s2``."""

    s1: SpinLabel
    s2: SpinLabel
    params: ModularParams = ModularParams()
    rel_tol: float = 1e-10

    def __post_init__(self):
        for name in ("s1", "s2"):
            v = getattr(self, name)
            if not isinstance(v, SpinLabel):
                object.__setattr__(self, name, SpinLabel(v))

    @property
    def spins(self):
        return self.s1.s, self.s2.s

    def R1(self, x1, x2):
        return gamma_array(np.asarray(x1, complex) - x2 - self.s1.s, self.params, "R1")

    def R3(self, x1, x2):
        return gamma_array(np.asarray(x1, complex) - x2 + 2 * self.s2.s - self.s1.s, self.params, "R3")

    def R2_multiplier(self, k):
        return gamma_array(np.asarray(k, complex) + self.s2.s, self.params, "R2")

    @property
    def strip(self):
        return (_STRIP[0] * self.params.Q / 2, _STRIP[1])

    def apply_R1(self, f, points):
        pts = _points(points)
        return self.R1(pts[:, 0], pts[:, 1]) * _as_two_var(f)(pts[:, 0], pts[:, 1])

    def apply_R3(self, f, points):
        pts = _points(points)
        return self.R3(pts[:, 0], pts[:, 1]) * _as_two_var(f)(pts[:, 0], pts[:, 1])

    def apply_R2(self, f: TestFunction, points):
        """``F2^-1 gamma(k + s2) F2 f`` with the inner transform exact."""
        return fourier_sandwich(f, 1, self.R2_multiplier, _points(points), 1, self.strip, self.rel_tol)

    def R2_callable(self, f: TestFunction):
        return lambda a, b: self.apply_R2(f, np.stack([np.ravel(a), np.ravel(b)], axis=1)).reshape(np.shape(a))

    # -- A^-1 by its kernel ---------------------------------------------------
    def _inverse_contour(self, f: TwoVarFunction, x1, x2):
        s1, s2 = self.spins
        Q = self.params.Q
        lower = [((x1 - s1).real, (x1 - s1).imag - Q / 2)]
        upper = [(x2.real, x2.imag)]
        if f.lower is not None:
            lower += list(f.lower(x1))
        if f.upper is not None:
            upper += list(f.upper(x1))
        plus = f.plus(x1, x2) if f.plus is not None else None
        minus = f.minus(x1, x2) if f.minus is not None else None
        center, half, preferred = 0.0, f.half_width, None
        if f.alpha is not None:
            # far from t = x2 the kernel is a plane wave of frequency xi; lifting the line
            # towards the saddle of the Gaussian avoids cancellation for large |xi|
            xi = (x2 - x1).real + s1 - s2
            preferred = float(np.clip(-PI * xi / f.alpha, -0.4 * Q, _LIFT))
            # the kernel grows like exp(2 pi Im(x2 - x1) t) as t -> +inf, which moves the Gaussian peak
            kappa = 2 * PI * max((x2 - x1).imag, 0.0) + PI * self.params.Q
            center = kappa / (4 * f.alpha)
            half = f.half_width + center
        return separating_contour(lower=lower, upper=upper, plus=plus, minus=minus, margin=_MARGIN,
                                  preferred=preferred, hold_preferred=preferred is not None, abs_tol=_ABS_TOL,
                                  target_rel_tol=self.rel_tol, half_width=half, center=center)

    def apply_A_inverse(self, f, points, with_error: bool = False):
        """
        ``[A^-1 f](points)`` by the kernel integral on a contour separating the
        ``+i0`` pole at ``t = x2`` from the singularities below.
        """
        f = _as_two_var(f)
        pts = _points(points)
        s1, s2 = self.spins
        p = self.params
        w2 = p.omega_dprime
        out = np.empty(len(pts), complex)
        errs = np.empty(len(pts))
        for i, (x1, x2) in enumerate(pts):
            contour = self._inverse_contour(f, x1, x2)

            def integrand(t, x1=x1, x2=x2):
                return (np.exp(2j * PI * (w2 - s2) * (x2 - t)) * gamma_array(x2 - t - w2, p, "Akern")
                        / gamma_array(x1 - t - s1, p, "Akern") * f(np.full(t.shape, x1), t))

            val, err = integrate_line(integrand, contour)
            pref = p.c / gamma_array(np.array([x1 - x2 - s1 + 2 * s2]), p, "Akern")[0]
            out[i], errs[i] = pref * val, abs(pref) * err
        return (out, errs) if with_error else out

    # -- A by stacked quadrature ----------------------------------------------
    def apply_A(self, f, points, step: float = 0.05, k_width: float | None = None):
        """
        ``[A f](points)`` at real points: ``R3 f`` is transformed in ``x2`` by
        the trapezoid rule on the real line, multiplied by ``gamma(k + s2)`` and
        transformed back by a second trapezoid sum, then multiplied by ``R1``.
        Both integrands are analytic in a strip and decay exponentially, so the
        sums converge geometrically in ``1 / step``.
        """
        f = _as_two_var(f)
        pts = _points(points)
        if np.any(pts.imag != 0):
            raise DomainViolation("A by stacked quadrature is evaluated at real points only")
        pts = pts.real
        # R3 f is analytic for |Im t| < Q/2, so its transform decays like exp(-pi Q |k|)
        kw = k_width or 40.0 / (PI * self.params.Q) + 2.0
        if step > 0.45 / kw:
            raise ValueError(f"step {step} aliases frequencies up to {kw:.3g}; use step <= {0.45 / kw:.3g}")
        t = np.arange(-f.half_width, f.half_width + step / 2, step)
        k = np.arange(-kw, kw + step / 2, step)
        out = np.empty(len(pts), complex)
        for x1 in np.unique(pts[:, 0]):
            sel = pts[:, 0] == x1
            h = self.R3(x1, t) * f(np.full(t.shape, x1), t)
            H = step * (np.exp(-2j * PI * np.outer(k, t)) @ h)
            back = step * (np.exp(2j * PI * np.outer(pts[sel, 1], k)) @ (self.R2_multiplier(k) * H))
            out[sel] = self.R1(x1, pts[sel, 1]) * back
        return out


def apply_undressing(chain: UndressingChain, f, point, direction=Direction.A_inverse):
    """Pointwise ``A f`` or ``A^-1 f``; see :class:`UndressingChain`."""
    direction = Direction(direction)
    pts = _points(point)
    val = chain.apply_A(f, pts) if direction is Direction.A else chain.apply_A_inverse(f, pts)
    return _unwrap(val, point)


# --------------------------------------------------------------------------- #
#  verification
# --------------------------------------------------------------------------- #
def _default_points():
    return np.array([[0.1, -0.2], [0.3 + 0.1j, 0.05], [-0.25, 0.4 - 0.05j], [0.6, 0.2]])


def _rel(lhs, rhs, scale):
    return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-3 * scale)))


def verify_undressing_chain(chain: UndressingChain, f: TestFunction | None = None, points=None) -> ResidualReport:
    """
    Residuals of ``C R f = R C' f`` for the three steps and of ``K12 R f = R K12 f``.

    Step 1 and step 3 involve closed forms only; step 2 applies one Fourier
    quadrature on each side. Residuals are relative, with the sum of word
    contributions as floor.
    """
    p = chain.params
    f = f if f is not None else TwoVarFunction.gaussian_pair().closed
    pts = _points(_default_points() if points is None else points)
    s1, s2 = chain.spins
    K = v_op(p, 0) * v_op(p, 1)
    C = [casimir_step(i, s1, s2, p) for i in range(4)]
    details = {}
    # step 1
    R1f = lambda a, b: chain.R1(a, b) * f(a, b)
    lhs, sc = evaluate(C[0], R1f, pts, with_scale=True)
    details["step1"] = _rel(lhs, chain.R1(pts[:, 0], pts[:, 1]) * apply(C[1], f)(pts[:, 0], pts[:, 1]), sc)
    lhs, sc = evaluate(K, R1f, pts, with_scale=True)
    details["K_step1"] = _rel(lhs, chain.R1(pts[:, 0], pts[:, 1]) * apply(K, f)(pts[:, 0], pts[:, 1]), sc)
    # step 2
    R2f = chain.R2_callable(f)
    lhs, sc = evaluate(C[1], R2f, pts, with_scale=True)
    details["step2"] = _rel(lhs, chain.apply_R2(apply(C[2], f), pts), sc)
    lhs, sc = evaluate(K, R2f, pts, with_scale=True)
    details["K_step2"] = _rel(lhs, chain.apply_R2(apply(K, f), pts), sc)
    # step 3
    R3f = lambda a, b: chain.R3(a, b) * f(a, b)
    lhs, sc = evaluate(C[2], R3f, pts, with_scale=True)
    details["step3"] = _rel(lhs, chain.R3(pts[:, 0], pts[:, 1]) * apply(C[3], f)(pts[:, 0], pts[:, 1]), sc)
    lhs, sc = evaluate(K, R3f, pts, with_scale=True)
    details["K_step3"] = _rel(lhs, chain.R3(pts[:, 0], pts[:, 1]) * apply(K, f)(pts[:, 0], pts[:, 1]), sc)
    return ResidualReport(
        identity_id="undressing", tag="A", parameters={"s1": s1, "s2": s2, "b": p.b}, details=details,
        metric="rel", condition="R2 realized as a Fourier sandwich inside the strip of gamma(k + s2)",
    )


def verify_composite(chain: UndressingChain, f: TestFunction | None = None, points=None) -> ResidualReport:
    """
    End-to-end ``Ct A^-1 g = A^-1 C12 g`` and ``K12 A^-1 g = A^-1 K12 g`` on a
    Gaussian pair, with ``A^-1`` by its kernel at complex shifted points.
    """
    p = chain.params
    f = f if f is not None else TwoVarFunction.gaussian_pair(1.0, 0.0, 2.0, 0.3j).closed
    pts = _points(np.array([[0.1, -0.2], [0.35, 0.15]]) if points is None else points)
    s1, s2 = chain.spins
    Ainv = lambda a, b: chain.apply_A_inverse(f, np.stack([np.ravel(a), np.ravel(b)], axis=1))
    details = {}
    lhs, sc = evaluate(casimir_step(3, s1, s2, p), Ainv, pts, with_scale=True)
    rhs = chain.apply_A_inverse(apply(casimir_word(s1, s2, p), f), pts)
    details["C_composite"] = _rel(lhs, rhs, sc)
    K = v_op(p, 0) * v_op(p, 1)
    lhs, sc = evaluate(K, Ainv, pts, with_scale=True)
    details["K_composite"] = _rel(lhs, chain.apply_A_inverse(apply(K, f), pts), sc)
    return ResidualReport(
        identity_id="undressing_composite", tag="Akern", parameters={"s1": s1, "s2": s2, "b": p.b},
        details=details, metric="rel", condition="A^-1 kernel on a separating contour",
    )


def inverse_consistency(chain: UndressingChain, f: TestFunction | None = None, point=(0.1, -0.2),
                        step: float = 0.05) -> float:
    """``|A A^-1 f - f| / |f|`` at one real point by two stacked quadratures."""
    f = TwoVarFunction.gaussian_pair() if f is None else _as_two_var(f)
    x1, x2 = point
    g = TwoVarFunction(
        lambda a, b: chain.apply_A_inverse(f, np.stack([np.ravel(a), np.ravel(b)], axis=1)),
        half_width=f.half_width + 4.0,
    )
    val = chain.apply_A(g, np.array([[x1, x2]]), step=step)[0]
    ref = complex(f(np.array([x1]), np.array([x2]))[0])
    return abs(val - ref) / abs(ref)


def multiplier_unimodularity(chain: UndressingChain, grid=None) -> float:
    """``max ||R1| - 1|, ||R3| - 1|, ||gamma(k + s2)| - 1|`` on a real grid."""
    g = np.linspace(-4, 4, 41) if grid is None else np.asarray(grid, float)
    a, b = np.meshgrid(g, g[::3])
    vals = [chain.R1(a, b), chain.R3(a, b), chain.R2_multiplier(g)]
    return float(max(np.max(np.abs(np.abs(v) - 1)) for v in vals))
