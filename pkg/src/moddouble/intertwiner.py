"""
Intertwiner A(s) between pi_s and pi_{-s}.

``A(s) = F^-1 M F`` with ``M`` the multiplication by

    M(k) = gamma(s - k) / gamma(-s - k)

on the Fourier side, which is the ratio ``Phi(Z u) / Phi(Z^-1 u)`` read at the
reflected Fourier coordinate. ``|M| = 1`` on the real line and
``M_{-s} = 1 / M_s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qdilog import ModularParams, gamma_array
from .quadrature import ContourSpec, integrate_line, line_rule
from .reports import ResidualReport
from .weyl_rep import Kind, SpinLabel, TestFunction, apply, evaluate, generator, v_op

PI = math.pi
_STRIP = 0.9  # fraction of the analyticity half-strip Q/2 the contour may use
_LOG_TOL = 40.0


@dataclass(frozen=True)
class IntertwinerSpec:
    """Spin and modulus of ``A(s)``; ``rel_tol`` drives the inverse-Fourier quadrature."""

    s: SpinLabel
    params: ModularParams = ModularParams()
    rel_tol: float = 1e-10

    def __post_init__(self):
        if not isinstance(self.s, SpinLabel):
            object.__setattr__(self, "s", SpinLabel(self.s))

    def multiplier(self, k) -> np.ndarray:
        """``M(k) = gamma(s - k) / gamma(-s - k)``."""
        k = np.asarray(k, dtype=complex)
        s = self.s.s
        return gamma_array(s - k, self.params, "M") / gamma_array(-s - k, self.params, "M")

    def reversed(self) -> "IntertwinerSpec":
        return IntertwinerSpec(SpinLabel(-self.s.s), self.params, self.rel_tol)


def fourier_sandwich(f: TestFunction, var: int, multiplier, points, orientation: int = 1,
                     strip=(-np.inf, np.inf), rel_tol: float = 1e-10) -> np.ndarray:
    """
    ``[F^-1 m F f]`` (``orientation = +1``) or ``[F m F^-1 f]`` (``-1``) in slot ``var``.

    The transform of ``f`` is exact; the outer transform is a tanh-sinh
    quadrature. Each Gaussian term is integrated on its own line
    ``Im k = kappa`` through its saddle, clipped to ``strip`` where the
    multiplier ``m`` is analytic. This keeps terms carrying large exponential
    factors free of cancellation.

    Parameters
    ----------
    f : TestFunction
    var : int
        Slot to transform.
    multiplier : callable
        Vectorized ``m(k)``.
    points : array_like, shape (npts, nvars) or (npts,)
    orientation : {1, -1}
    strip : (float, float)
        Allowed heights of the Fourier-side line.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    npts = pts.shape[0]
    G = f.fourier(var, -orientation)
    lo_s, hi_s = strip
    out = np.zeros(npts, complex)
    xv = pts[:, var]
    for term in G.terms:
        single = TestFunction([term], G.nvars)
        a, b = term.alpha[var], term.beta[var]
        g = b + orientation * 2j * PI * xv
        kappa = np.round(np.clip((g / (2 * a)).imag, lo_s, hi_s), 2)
        for kap in np.unique(kappa):
            sel = np.nonzero(kappa == kap)[0]
            gs = g[sel]
            centers = (gs - 2j * a * kap).real / (2 * a.real)
            w = math.sqrt((_LOG_TOL + 2 * term.coeffs.shape[var]) / a.real) + 2 * PI * abs(kap) / a.real + 1.0
            lo, hi = centers.min() - w, centers.max() + w
            contour = ContourSpec(imag_offset=float(kap), center=0.5 * (lo + hi), half_width=0.5 * (hi - lo),
                                  target_rel_tol=rel_tol, piece_length=4.0)
            sub = pts[sel]

            def integrand(k, sub=sub):
                coords = [np.broadcast_to(sub[None, :, j], (k.size, sub.shape[0])) for j in range(G.nvars)]
                coords[var] = np.broadcast_to(k[:, None], (k.size, sub.shape[0]))
                return (single(*coords) * multiplier(k)[:, None]
                        * np.exp(orientation * 2j * PI * np.outer(k, sub[:, var])))

            val, _ = integrate_line(integrand, contour)
            out[sel] += val
    return out


def apply_intertwiner(spec: IntertwinerSpec, f: TestFunction, eval_points) -> np.ndarray:
    """
    ``[A(s) f](x)`` at ``eval_points``.

    ``F f`` is taken in closed form, multiplied by ``M`` and transformed back
    by quadrature (see :func:`fourier_sandwich`).

    Raises
    ------
    NonConvergence
    """
    x = np.atleast_1d(np.asarray(eval_points, dtype=complex))
    limit = _STRIP * spec.params.Q / 2
    return fourier_sandwich(f, 0, spec.multiplier, x, 1, (-limit, limit), spec.rel_tol)


def intertwiner_callable(spec: IntertwinerSpec, f: TestFunction):
    """Pointwise-evaluable ``A(s) f`` for use with :func:`weyl_rep.evaluate`."""
    return lambda x: apply_intertwiner(spec, f, x)


def _default_sample():
    return [TestFunction.gaussian(1.0, 0.1j), TestFunction.gaussian(0.5, 0.2, (1.0, 0.3j))]


def _default_points():
    return [0.1, -0.3 + 0.05j, 0.25, 0.6 - 0.1j, -0.75]


def verify_intertwining(spec: IntertwinerSpec, sample=None, points=None) -> ResidualReport:
    """
    Residuals of ``e(s) A = A e(-s)``, ``f(s) A = A f(-s)`` and ``v A = A v``.

    The left sides apply the shift-and-multiply words to ``A f`` evaluated by
    quadrature at moved points; the right sides transform ``e(-s) f`` etc. in
    closed form before the quadrature. The ``v`` relation is also checked on
    the Fourier side, where ``v`` becomes multiplication by ``exp(4 pi i omega' k)``
    and commutes with ``M`` exactly.
    """
    p = spec.params
    sample = _default_sample() if sample is None else list(sample)
    pts = np.asarray(_default_points() if points is None else points, dtype=complex)
    s = spec.s.s
    details = {"e": 0.0, "f": 0.0, "v": 0.0, "v_fourier": 0.0}
    for f in sample:
        Af = intertwiner_callable(spec, f)
        for name, kind in (("e", Kind.e_small), ("f", Kind.f_small), ("v", Kind.K)):
            lhs, scale = evaluate(generator(kind, s, p), Af, pts, with_scale=True)
            rhs = apply_intertwiner(spec, apply(generator(kind, -s, p), f), pts)
            res = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-3 * scale)
            details[name] = max(details[name], float(np.max(res)))
        # F v f = exp(4 pi i omega' k) F f exactly; M commutes with that factor
        G1 = apply(v_op(p), f).fourier(0)
        G2 = f.fourier(0).mul_exp(0, 4j * PI * p.omega_prime)
        k = np.linspace(-3, 3, 13)
        m = spec.multiplier(k)
        d = np.abs(m * G1(k) - m * G2(k)) / np.maximum(np.abs(m * G2(k)), 1e-300)
        details["v_fourier"] = max(details["v_fourier"], float(np.max(d)))
    return ResidualReport(
        identity_id="SysA", tag="SysA", parameters={"s": s, "b": p.b}, details=details, metric="rel",
        condition="inverse Fourier transform by quadrature on a line inside |Im k| < Q/2",
    )


def unimodularity_residual(spec: IntertwinerSpec, grid=None) -> float:
    """``max ||M(k)| - 1|`` on a real grid (default 100 points in [-5, 5])."""
    k = np.linspace(-5, 5, 100) if grid is None else np.asarray(grid, dtype=float)
    return float(np.max(np.abs(np.abs(spec.multiplier(k)) - 1)))


def inverse_residual(spec: IntertwinerSpec, f: TestFunction | None = None, points=None,
                     level: int = 4) -> float:
    """
    ``max |A(-s) A(s) f - f| / |f|`` at ``points`` using two stacked quadratures.

    ``A(s) f`` is sampled by quadrature on tanh-sinh nodes of the real line,
    transformed to the Fourier side by the same rule, multiplied by ``M_{-s}``
    and transformed back on a fixed rule in ``k``.
    """
    f = f or _default_sample()[0]
    pts = np.atleast_1d(np.asarray([0.1, -0.3, 0.25, 0.6, -0.75] if points is None else points, dtype=float))
    kw = math.sqrt((_LOG_TOL + 4) / f.fourier(0).terms[0].alpha[0].real) + 1.0
    kline = ContourSpec(half_width=kw, piece_length=4.0)
    k, wk = line_rule(kline, level)
    # A(s) f decays like f up to a shift of order s
    xw = math.sqrt((_LOG_TOL + 4) / f.terms[0].alpha[0].real) + 2 * abs(spec.s.s) + 2.0
    xline = ContourSpec(half_width=xw, piece_length=4.0)
    x, wx = line_rule(xline, level)
    Af = apply_intertwiner(spec, f, x)
    FAf = (np.exp(-2j * PI * np.outer(k, x)) * (wx * Af)[None, :]).sum(axis=1)
    back = (np.exp(2j * PI * np.outer(pts, k)) * (wk * spec.reversed().multiplier(k) * FAf)[None, :]).sum(axis=1)
    ref = f(pts)
    return float(np.max(np.abs(back - ref) / np.maximum(np.abs(ref), 1e-12)))


def parseval_residual(spec: IntertwinerSpec, f: TestFunction | None = None, level: int = 4) -> float:
    """``| ||A(s) f||^2 / ||f||^2 - 1 |`` with the left norm by quadrature."""
    f = f or _default_sample()[0]
    xw = math.sqrt((_LOG_TOL + 4) / f.terms[0].alpha[0].real) + 2 * abs(spec.s.s) + 2.0
    x, wx = line_rule(ContourSpec(half_width=xw, piece_length=4.0), level)
    Af = apply_intertwiner(spec, f, x)
    return float(abs((wx * np.abs(Af) ** 2).sum() / f.norm2() - 1))
