"""
Contour quadrature engines.

Every integral in the package runs over a horizontal line ``t = tau + i*y(tau)``
with ``tau`` truncated to ``|tau - center| <= half_width``. The height ``y`` is
``imag_offset`` plus optional smooth deformations:

* bumps, Gaussian lifts or dips of the line used to pass a singular point on
  the prescribed side (the numerical form of an ``i0`` prescription);
* tilts, softplus ramps that bend the line up or down beyond a given abscissa
  to damp chirps such as ``exp(-i pi t**2)``.

The adaptive rule is tanh-sinh with dyadic refinement on each piece between
breakpoints. A uniform trapezoid rule is also provided for integrands that are
analytic in a strip around the line, where it converges geometrically at far
lower cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainViolation, EndpointMass, LadderDivergence, NonConvergence

_EPS = np.finfo(float).eps
_U_MAX = 4.0
_H0 = 0.5


class Bump(NamedTuple):
    """Gaussian deformation ``height * exp(-((tau - at) / width)**2)`` of the line."""

    at: float
    height: float
    width: float


class Tilt(NamedTuple):
    """Softplus ramp of slope ``slope`` starting near ``start``.

    ``side = +1`` bends the line for ``tau > start``, ``side = -1`` for
    ``tau < start``. ``smooth`` is the softplus scale.
    """

    start: float
    slope: float
    side: int = 1
    smooth: float = 0.5


@dataclass(frozen=True)
class ContourSpec:
    """Truncated, possibly deformed, integration line.

    Parameters
    ----------
    imag_offset : float
        Base height of the line above the real axis.
    half_width : float
        Truncation ``|Re t - center| <= half_width``.
    node_budget : int
        Maximum number of integrand evaluations for one adaptive integral.
    target_rel_tol : float
        Relative tolerance for the refinement stopping rule.
    center : float
        Midpoint of the truncation window.
    bumps, tilts : tuple
        Smooth deformations, see :class:`Bump` and :class:`Tilt`.
    breakpoints : tuple of float
        Abscissae at which the window is split; tanh-sinh clusters nodes there.
    abs_tol : float
        Absolute tolerance used when the integral itself is close to zero.
    piece_length : float
        When positive, the window is further split into pieces no longer than
        this, which keeps tanh-sinh efficient on long oscillatory windows.
    """

    imag_offset: float = 0.0
    half_width: float = 50.0
    node_budget: int = 1 << 18
    target_rel_tol: float = 1e-11
    center: float = 0.0
    bumps: tuple = ()
    tilts: tuple = ()
    breakpoints: tuple = ()
    abs_tol: float = 0.0
    piece_length: float = 0.0

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if not self.target_rel_tol > 0:
            raise ValueError("target_rel_tol must be positive")
        if self.node_budget < 16:
            raise ValueError("node_budget must be at least 16")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be non-negative")

    def with_(self, **kw) -> "ContourSpec":
        return replace(self, **kw)

    def height(self, tau):
        """Return ``Im t`` and ``d(Im t)/d tau`` at real abscissae ``tau``."""
        tau = np.asarray(tau, dtype=float)
        y = np.full(tau.shape, float(self.imag_offset))
        dy = np.zeros(tau.shape)
        for bp in self.bumps:
            r = (tau - bp.at) / bp.width
            g = bp.height * np.exp(-r * r)
            y += g
            dy += -2.0 * r / bp.width * g
        for tl in self.tilts:
            arg = tl.side * (tau - tl.start) / tl.smooth
            y += tl.slope * tl.smooth * np.logaddexp(0.0, arg)
            dy += tl.slope * tl.side * _sigmoid(arg)
        return y, dy

    def point(self, tau):
        """Map real abscissae to contour points ``t`` and Jacobians ``dt/dtau``."""
        y, dy = self.height(tau)
        return np.asarray(tau) + 1j * y, 1.0 + 1j * dy

    @property
    def window(self) -> tuple[float, float]:
        return self.center - self.half_width, self.center + self.half_width


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


# --------------------------------------------------------------------------- #
#  tanh-sinh rule on [a, b]
# --------------------------------------------------------------------------- #
def _ts_nodes(a: float, b: float, h: float, odd_only: bool):
    """Abscissae and weights of the tanh-sinh rule with step ``h`` on [a, b].

    With ``odd_only`` only the nodes new at this step size are returned.
    """
    n = int(math.floor(_U_MAX / h))
    k = np.arange(-n, n + 1)
    if odd_only:
        k = k[k % 2 != 0]
    u = k * h
    y = 0.5 * math.pi * np.sinh(u)
    half = 0.5 * (b - a)
    # distance to the nearer end, computed without cancellation
    d = 2.0 / (1.0 + np.exp(2.0 * np.abs(y)))
    x = np.where(u < 0, a + half * d, b - half * d)
    w = half * 0.5 * math.pi * np.cosh(u) / np.cosh(y) ** 2
    keep = (d > 0) & (w > 0)
    return x[keep], w[keep]


def _pieces(contour: ContourSpec):
    lo, hi = contour.window
    cuts = sorted(p for p in contour.breakpoints if lo < p < hi)
    edges = [lo, *cuts, hi]
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        n = 1
        if contour.piece_length > 0:
            n = max(1, int(math.ceil((b - a) / contour.piece_length)))
        cut = np.linspace(a, b, n + 1)
        out.extend(zip(cut[:-1], cut[1:]))
    return out


def line_rule(contour: ContourSpec, level: int = 5):
    """Fixed tanh-sinh nodes and complex weights on the contour.

    Returns ``(t, w)`` with ``sum(w * f(t))`` approximating the integral. Used
    for tensor-product quadratures where the same nodes serve many integrands.
    """
    h = _H0 / (1 << level)
    ts, ws = [], []
    for a, b in _pieces(contour):
        x, w = _ts_nodes(a, b, h, False)
        t, jac = contour.point(x)
        ts.append(t)
        ws.append(w * h * jac)
    return np.concatenate(ts), np.concatenate(ws)


def trapezoid_rule(contour: ContourSpec, h: float):
    """Uniform nodes and complex weights on the contour with spacing ``h``."""
    lo, hi = contour.window
    n = int(math.ceil((hi - lo) / (2 * h)))
    tau = contour.center + h * np.arange(-n, n + 1)
    t, jac = contour.point(tau)
    return t, h * jac


def _check_finite(vals, t):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = np.argwhere(bad)[0][0]
        raise NonConvergence(f"non-finite integrand value at t = {t[idx]:.6g}")


def integrate_line(
    integrand: Callable[[np.ndarray], np.ndarray],
    contour: ContourSpec,
    min_level: int = 2,
) -> tuple:
    """
    Adaptive tanh-sinh quadrature on a contour.

    Parameters
    ----------
    integrand : callable
        Vectorized function of a complex array ``t`` of shape ``(n,)``. It may
        return shape ``(n,)`` or ``(n, ...)`` to integrate a batch of integrands
        on shared nodes.
    contour : ContourSpec
    min_level : int
        Minimum number of refinements before the stopping rule applies.

    Returns
    -------
    value : complex or ndarray
    error_estimate : float
        Largest difference between the last two refinement levels.

    Raises
    ------
    NonConvergence
        Tolerance not met within ``node_budget`` evaluations.
    EndpointMass
        Integrand at the truncation ends is not negligible.
    """
    tol = contour.target_rel_tol
    pieces = _pieces(contour)
    npc = len(pieces)
    acc = [None] * npc
    absacc = [None] * npc
    cur = [None] * npc
    prev = [None] * npc
    level = [0] * npc
    evals = 0

    def sweep(active):
        # one refinement level on every active piece with a single integrand call
        nonlocal evals
        xs, ws, owner = [], [], []
        for i in active:
            a, b = pieces[i]
            x, w = _ts_nodes(a, b, _H0 / (1 << level[i]), level[i] > 0)
            xs.append(x)
            ws.append(w)
            owner.append(np.full(x.size, i))
        x = np.concatenate(xs)
        t, jac = contour.point(x)
        vals = np.asarray(integrand(t))
        evals += t.size
        _check_finite(vals, t)
        wv = (np.concatenate(ws) * jac).reshape((-1,) + (1,) * (vals.ndim - 1)) * vals
        owner = np.concatenate(owner)
        for i in active:
            sel = owner == i
            part = wv[sel].sum(axis=0)
            apart = np.abs(wv[sel]).sum(axis=0)
            acc[i] = part if acc[i] is None else acc[i] + part
            absacc[i] = apart if absacc[i] is None else absacc[i] + apart
            h = _H0 / (1 << level[i])
            prev[i], cur[i] = cur[i], h * acc[i]
            level[i] += 1

    everything = list(range(npc))
    sweep(everything)
    sweep(everything)
    # the coarse levels fix the scale for the stopping rule
    scale = np.max(sum(np.abs(c) for c in cur))
    diffs = [np.inf] * npc
    active = everything
    while True:
        still = []
        for i in active:
            a_i = _H0 / (1 << (level[i] - 1)) * absacc[i]
            diffs[i] = float(np.max(np.abs(cur[i] - prev[i])))
            floor = 64 * _EPS * np.max(a_i)
            goal = max(tol * scale, contour.abs_tol, floor)
            if not (level[i] > min_level and diffs[i] <= goal):
                still.append(i)
        if not still:
            break
        if evals > contour.node_budget:
            worst = max(still, key=lambda i: diffs[i])
            raise NonConvergence(
                f"refinement stalled at level {level[worst]}: difference {diffs[worst]:.3g} "
                f"above goal {max(tol * scale, contour.abs_tol):.3g} after {evals} evaluations"
            )
        sweep(still)
        active = still
    total = sum(cur)
    abs_total = sum(_H0 / (1 << (level[i] - 1)) * absacc[i] for i in everything)
    _check_endpoints(integrand, contour, total, abs_total)
    if np.ndim(total) == 0:
        total = complex(total)
    return total, float(sum(diffs))


def _check_endpoints(integrand, contour, total, abs_total):
    lo, hi = contour.window
    t, _ = contour.point(np.array([lo, hi]))
    with np.errstate(all="ignore"):
        vals = np.asarray(integrand(t))
    mass = np.max(np.abs(vals)) if np.all(np.isfinite(vals)) else np.inf
    goal = max(
        contour.target_rel_tol * np.max(np.abs(total)),
        contour.abs_tol,
        64 * _EPS * np.max(abs_total),
        1e-300,
    )
    if not mass <= goal:
        raise EndpointMass(
            f"integrand magnitude {mass:.3g} at the truncation ends exceeds {goal:.3g}; "
            "widen half_width"
        )


def integrate_trapezoid(integrand, contour: ContourSpec, h: float) -> tuple:
    """
    Uniform trapezoid rule with an embedded error estimate.

    The estimate is ``|S_h - S_2h|`` where ``S_2h`` reuses every other node.
    For strip-analytic integrands the error of ``S_h`` is roughly the square of
    the relative error of ``S_2h``, so the returned estimate is conservative.
    """
    t, w = trapezoid_rule(contour, h)
    vals = np.asarray(integrand(t))
    _check_finite(vals, t)
    ww = w.reshape((-1,) + (1,) * (vals.ndim - 1))
    full = np.sum(ww * vals, axis=0)
    n = t.size
    sub = 2.0 * np.sum((ww * vals)[(np.arange(n) - n // 2) % 2 == 0], axis=0)
    err = float(np.max(np.abs(full - sub)))
    _check_endpoints(integrand, contour, full, np.sum(np.abs(ww * vals), axis=0))
    if np.ndim(full) == 0:
        full = complex(full)
    return full, err


# --------------------------------------------------------------------------- #
#  contours separating singular half-lines
# --------------------------------------------------------------------------- #
class EndDecay(NamedTuple):
    """Asymptotic form ``|f(t)| ~ |exp(i pi chi t^2 + 2 pi i kappa t)|`` at one end."""

    kappa: complex
    chi: float = 0.0


def separating_contour(
    lower: Sequence[tuple] = (),
    upper: Sequence[tuple] = (),
    plus: EndDecay | None = None,
    minus: EndDecay | None = None,
    margin: float = 0.15,
    allow_tilt: bool = True,
    min_rate: float = 0.6,
    max_slope: float = 1.5,
    preferred: float | None = None,
    hold_preferred: bool = False,
    **spec_kw,
) -> ContourSpec:
    """
    Build a contour passing above every lower and below every upper half-line.

    Parameters
    ----------
    lower : sequence of (re, top)
        Singularities at ``re + i y`` for ``y <= top``.
    upper : sequence of (re, bottom)
        Singularities at ``re + i y`` for ``y >= bottom``.
    plus, minus : EndDecay, optional
        Asymptotics of the integrand at ``Re t -> +inf`` and ``-inf``.
    margin : float
        Minimal vertical clearance from every singular point.
    allow_tilt : bool
        Permit tilting the ends beyond all singular abscissae to obtain decay.
    min_rate : float
        Minimal exponential decay rate required at each end.
    max_slope : float
        Largest admissible tilt slope.
    preferred : float, optional
        Preferred base height when a straight line fits.
    hold_preferred : bool
        Keep the base line at ``preferred`` even when it crosses singular
        half-lines, bending around them with local bumps instead.
    **spec_kw
        Extra ContourSpec fields.

    Raises
    ------
    DomainViolation
        The half-lines pinch the contour or an end cannot be made decaying.
    """
    lower = [(float(r), float(t)) for r, t in lower]
    upper = [(float(r), float(b)) for r, b in upper]
    top = max((t for _, t in lower), default=-np.inf)
    bottom = min((b for _, b in upper), default=np.inf)
    bumps = []
    held = hold_preferred and preferred is not None
    if top + 2 * margin <= bottom and not (held and not top + margin <= preferred <= bottom - margin):
        lo_ok, hi_ok = top + margin, bottom - margin
        if preferred is not None:
            eta = min(max(preferred, lo_ok), hi_ok)
        elif np.isfinite(top) and np.isfinite(bottom):
            eta = 0.5 * (top + bottom)
        elif np.isfinite(top):
            eta = top + margin
        elif np.isfinite(bottom):
            eta = bottom - margin
        else:
            eta = 0.0 if preferred is None else preferred
    else:
        eta = 0.5 * (top + bottom) if preferred is None else preferred
        need = {}
        for r, t in lower:
            if t + margin > eta:
                key = (r, +1)
                need[key] = max(need.get(key, -np.inf), t + margin)
        for r, b in upper:
            if b - margin < eta:
                key = (r, -1)
                need[key] = min(need.get(key, np.inf), b - margin)
        targets = [(r, h, d) for (r, d), h in need.items()]
        # only bumps pulling in opposite directions limit the width
        dmin = min((abs(r1 - r2) for r1, _, d1 in targets for r2, _, d2 in targets if d1 != d2), default=np.inf)
        width = min(0.35, 0.3 * dmin)
        if not width > 1e-3:
            raise DomainViolation("singular half-lines pinch the contour")
        heights = np.array([tg - eta for _, tg, _ in targets])
        pos = np.array([r for r, _, _ in targets])
        # fixed point so that the summed bumps meet each target exactly
        for _ in range(50):
            G = np.exp(-((pos[:, None] - pos[None, :]) / width) ** 2)
            resid = (eta + G @ heights) - np.array([tg for _, tg, _ in targets])
            heights = heights - resid
            if np.max(np.abs(resid)) < 1e-12:
                break
        bumps = [Bump(r, float(hgt), width) for r, hgt in zip(pos, heights)]
    base = ContourSpec(imag_offset=eta, bumps=tuple(bumps))
    y_low = [base.height(np.array([r]))[0][0] for r, _ in lower]
    y_up = [base.height(np.array([r]))[0][0] for r, _ in upper]
    if any(y < t + 0.5 * margin for y, (_, t) in zip(y_low, lower)) or any(
        y > b - 0.5 * margin for y, (_, b) in zip(y_up, upper)
    ):
        raise DomainViolation("singular half-lines pinch the contour")

    res = [r for r, _ in lower + upper] or [0.0]
    start_p, start_m = max(res) + 1.5, min(res) - 1.5
    tilts = []
    reach = []
    for side, end, start in ((1, plus, start_p), (-1, minus, start_m)):
        if end is None:
            reach.append(40.0)
            continue
        kappa, chi = complex(end.kappa), float(end.chi)
        # straight line at height eta: exponent slope along the outward direction
        rate0 = 2 * math.pi * side * (chi * eta + kappa.imag)
        if chi == 0.0:
            sigma = 0.0
            if rate0 < min_rate:
                if not allow_tilt or kappa.real == 0.0:
                    raise DomainViolation(
                        f"no decay at the {'+' if side > 0 else '-'} end: "
                        f"requires {'Im' if side > 0 else '-Im'} kappa > 0 with kappa = {kappa:.4g}"
                    )
                sigma = (side * min_rate / (2 * math.pi) - kappa.imag) / kappa.real
                if abs(sigma) > max_slope:
                    raise DomainViolation(
                        f"end {'+' if side > 0 else '-'} needs tilt slope {sigma:.3g} beyond {max_slope}"
                    )
            rate = 2 * math.pi * side * (kappa.imag + sigma * kappa.real)
            L = 38.0 / rate
        else:
            if rate0 >= min_rate:
                sigma = 0.0
                L = 38.0 / rate0
            else:
                if not allow_tilt:
                    raise DomainViolation("chirp end requires a contour tilt")
                sigma = 0.3 * math.copysign(1.0, chi)
                # Gaussian decay 2 pi |chi sigma| d^2 plus a possibly adverse linear term
                lin = max(0.0, -(rate0 + 2 * math.pi * side * sigma * kappa.real))
                a = 2 * math.pi * abs(chi * sigma)
                L = (lin + math.sqrt(lin * lin + 4 * a * 38.0)) / (2 * a)
        if sigma != 0.0:
            # the ramp has slope dy/dtau = sigma for side +1 and -sigma... keep sign so
            # that Im t grows like sigma * tau on the outward ray
            tilts.append(Tilt(start, sigma if side > 0 else -sigma, side))
        reach.append(abs(start) + L + 2.0)
    half = max(reach)
    kw = dict(imag_offset=eta, bumps=tuple(bumps), tilts=tuple(tilts), half_width=half,
              piece_length=2.0)
    kw.update(spec_kw)
    return ContourSpec(**kw)


# --------------------------------------------------------------------------- #
#  regulator ladders
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class RegulatorLadder:
    """
    Descending regulator values for an ``i0`` limit.

    ``delta_values`` may be empty; otherwise it pairs entry by entry with
    ``eps_values``. With ``constraint`` set every pair must satisfy
    ``delta > 2 * eps``.
    """

    eps_values: tuple = (4e-4, 2e-4, 1e-4)
    delta_values: tuple = ()
    constraint: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eps_values", tuple(float(e) for e in self.eps_values))
        object.__setattr__(self, "delta_values", tuple(float(d) for d in self.delta_values))
        for name, vals in (("eps_values", self.eps_values), ("delta_values", self.delta_values)):
            if any(not v > 0 for v in vals):
                raise ValueError(f"{name} must be positive")
            if any(b >= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly decreasing")
        if not self.eps_values:
            raise ValueError("eps_values must not be empty")
        if self.delta_values and len(self.delta_values) != len(self.eps_values):
            raise ValueError("delta_values must pair with eps_values")
        if self.constraint:
            if not self.delta_values:
                raise ValueError("constraint requires delta_values")
            for e, d in zip(self.eps_values, self.delta_values):
                if not d > 2 * e:
                    raise ValueError(f"pair eps={e}, delta={d} violates delta > 2 eps")

    @classmethod
    def paired(cls, eps_values: Sequence[float], ratio: float = 2.5) -> "RegulatorLadder":
        """Ladder with ``delta = ratio * eps`` and the ``delta > 2 eps`` constraint."""
        eps = tuple(eps_values)
        return cls(eps, tuple(ratio * e for e in eps), constraint=True)

    def halved(self) -> "RegulatorLadder":
        return RegulatorLadder(
            tuple(e / 2 for e in self.eps_values),
            tuple(d / 2 for d in self.delta_values),
            self.constraint,
        )

    def pairs(self):
        if self.delta_values:
            return list(zip(self.eps_values, self.delta_values))
        return [(e, None) for e in self.eps_values]

    def to_dict(self) -> dict:
        return {
            "eps_values": list(self.eps_values),
            "delta_values": list(self.delta_values),
            "constraint": self.constraint,
        }


@dataclass
class RegulatedResult:
    """Extrapolated value of a regulated integral.

    Attributes
    ----------
    value : complex
        Polynomial extrapolation to zero regulator.
    spread : float
        Change of the extrapolant when the largest ladder entry is dropped.
    values : list of complex
        Raw integrals along the ladder.
    quadrature_error : float
        Largest quadrature error estimate along the ladder.
    """

    value: complex
    spread: float
    values: list = field(default_factory=list)
    quadrature_error: float = 0.0

    def __complex__(self):
        return complex(self.value)


def extrapolate_to_zero(x: Sequence[float], y: Sequence[complex]) -> complex:
    """Neville evaluation at 0 of the interpolating polynomial through ``(x, y)``."""
    x = np.asarray(x, dtype=float)
    p = np.array(y, dtype=complex)
    n = len(x)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i])
    return complex(p[0])


def ladder_limit(family: Callable, eps: float, n: int = 3):
    """
    Zero-regulator limit of a pointwise regulated closed form.

    ``family(e)`` is evaluated at ``e = eps, eps/2, ..., eps/2**(n-1)`` and the
    values are extrapolated to ``e = 0`` elementwise by Neville's scheme.

    Returns
    -------
    value : ndarray
        Extrapolated values.
    spread : ndarray of float
        Change of the extrapolant when the largest regulator is dropped.
    """
    xs = [eps / 2 ** k for k in range(n)]
    ys = [np.asarray(family(e), dtype=complex) for e in xs]

    def neville(x, y):
        p = [v.copy() for v in y]
        for k in range(1, len(x)):
            for i in range(len(x) - k):
                p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i])
        return p[0]

    value = neville(xs, ys)
    spread = np.abs(value - neville(xs[1:], ys[1:])) if n > 1 else np.zeros(value.shape)
    return value, spread


def integrate_regulated(
    family: Callable,
    ladder: RegulatorLadder,
    contour: ContourSpec | None = None,
    divergence_tol: float = 1e-2,
    condition: str = "",
    rule: Callable | None = None,
) -> RegulatedResult:
    """
    Integrate a regulated family along a ladder and extrapolate to zero.

    Parameters
    ----------
    family : callable
        ``family(eps, delta)`` returns an integrand, or a pair
        ``(integrand, contour)`` when the contour depends on the regulators.
        ``delta`` is ``None`` for ladders without delta values.
    ladder : RegulatorLadder
    contour : ContourSpec, optional
        Contour used when the family returns a bare integrand.
    divergence_tol : float
        Relative spread above which the ladder is declared divergent.
    condition : str
        Convergence condition quoted in the LadderDivergence message.
    rule : callable, optional
        Replacement for :func:`integrate_line` with the same signature.

    Raises
    ------
    LadderDivergence
    """
    rule = integrate_line if rule is None else rule
    vals, errs = [], []
    for eps, delta in ladder.pairs():
        out = family(eps, delta)
        if isinstance(out, tuple):
            f, cont = out
        else:
            f, cont = out, contour
        if cont is None:
            raise ValueError("no contour supplied for the regulated family")
        v, e = rule(f, cont)
        vals.append(complex(v))
        errs.append(e)
    x = ladder.eps_values
    if not all(np.isfinite(vals)):
        raise LadderDivergence(f"non-finite regulated value; check condition {condition}")
    value = extrapolate_to_zero(x, vals)
    spread = abs(value - extrapolate_to_zero(x[1:], vals[1:])) if len(vals) > 1 else 0.0
    if spread > divergence_tol * max(abs(value), 1e-12):
        raise LadderDivergence(
            f"regulated values {vals} do not stabilize (spread {spread:.3g}); "
            f"check condition {condition}"
        )
    return RegulatedResult(value, float(spread), vals, float(max(errs)))


# --------------------------------------------------------------------------- #
#  smeared delta harness
# --------------------------------------------------------------------------- #
DELTA_FORMS = ("δ(s−s′)", "δ(s−s′)+δ(s+s′)", "δ(x−y)")
_ASCII_FORMS = {"delta(s-s')": "δ(s−s′)", "delta(s-s')+delta(s+s')": "δ(s−s′)+δ(s+s′)",
                "delta(x-y)": "δ(x−y)"}


@dataclass
class SmearedDeltaResult:
    """Smeared comparison of a kernel with its distributional limit."""

    lhs: complex
    rhs: complex
    residual: float
    quadrature_error: float
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.residual = float(abs(self.lhs - self.rhs))
        self.quadrature_error = float(abs(self.quadrature_error))

    @property
    def relative_residual(self) -> float:
        return self.residual / max(abs(self.rhs), 1e-300)


def _normalize_form(expected: str) -> str:
    form = _ASCII_FORMS.get(expected.replace(" ", ""), expected.replace(" ", ""))
    if form not in DELTA_FORMS:
        raise ValueError(f"unknown distributional form {expected!r}")
    return form


def smeared_rhs(f, g, expected: str, weight=None, contour: ContourSpec | None = None):
    """Smearing of the distributional form against the test pair ``(f, g)``."""
    form = _normalize_form(expected)
    contour = contour or ContourSpec(half_width=12.0, target_rel_tol=1e-12)
    w = weight or (lambda s: 1.0)
    if form == "δ(s−s′)+δ(s+s′)":
        integrand = lambda s: np.conj(f(s)) * (g(s) + g(-s)) * w(s)
    else:
        integrand = lambda s: np.conj(f(s)) * g(s) * w(s)
    return integrate_line(integrand, contour)


def smeared_delta_check(
    kernel,
    testpair: tuple,
    expected: str = "δ(s−s′)",
    weight=None,
    contour: ContourSpec | None = None,
) -> SmearedDeltaResult:
    """
    Compare ``∬ conj(f(s)) K(s, s') g(s') ds ds'`` with the smeared limit form.

    Parameters
    ----------
    kernel : callable or object
        Either a vectorized pointwise kernel ``K(s, s_prime)`` or an object with
        a ``smear(f, g)`` method returning ``(lhs, error)``; the latter is used
        for kernels that exist only as distributions.
    testpair : (callable, callable)
        Smearing functions of a real variable.
    expected : str
        One of ``"δ(s−s′)"``, ``"δ(s−s′)+δ(s+s′)"``, ``"δ(x−y)"`` (ASCII
        spellings ``"delta(s-s')"`` etc. are accepted).
    weight : callable, optional
        Weight ``w(s)`` multiplying the delta terms.
    contour : ContourSpec, optional
        Real-line contour covering the supports of the test functions.
    """
    form = _normalize_form(expected)
    f, g = testpair
    contour = contour or ContourSpec(half_width=12.0, target_rel_tol=1e-10)
    rhs, rerr = smeared_rhs(f, g, form, weight, contour)
    if hasattr(kernel, "smear"):
        lhs, lerr = kernel.smear(f, g)
        return SmearedDeltaResult(lhs, rhs, 0.0, lerr + rerr)

    inner_err = [0.0]

    def inner(s_arr):
        out = np.empty(s_arr.shape, dtype=complex)
        for i, s in enumerate(s_arr):
            bps = [s.real]
            if form == "δ(s−s′)+δ(s+s′)":
                bps.append(-s.real)
            cont = contour.with_(breakpoints=tuple(bps), abs_tol=contour.target_rel_tol * 1e-6)
            v, e = integrate_line(lambda sp: kernel(s, sp) * g(sp), cont)
            out[i] = v
            inner_err[0] = max(inner_err[0], e)
        return out

    lhs, lerr = integrate_line(lambda s: np.conj(f(s)) * inner(s), contour)
    return SmearedDeltaResult(lhs, rhs, 0.0, lerr + rerr + inner_err[0] * 2 * contour.half_width)


def gaussian_window(center: float, width: float):
    """Unit L2-norm real Gaussian window ``(2 pi w^2)^(-1/4) exp(-(s-c)^2/(4 w^2))``."""
    norm = (2.0 * math.pi * width * width) ** -0.25

    def w(s):
        d = np.asarray(s) - center
        return norm * np.exp(-d * d / (4.0 * width * width))

    return w
