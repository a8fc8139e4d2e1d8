"""
Modular quantum dilogarithm.

``gamma(x)`` is defined for ``|Im x| < Q/2`` by

    log gamma(x) = -1/4 ∫ dt/t  exp(i t x) / (sin(omega t) sin(omega' t))

on a line passing above ``t = 0`` and continued to the whole plane by the two
shift equations and the reflection formula. Half-periods are charted by one
positive modulus ``b``: ``omega = i b/2``, ``omega' = i/(2b)``, ``Q = b + 1/b``.

Evaluation strategy
-------------------
* ``Re z < 0``: reflect, ``gamma(z) = exp(i beta + i pi z^2) / gamma(-z)``.
* ``|Im z| > min(b, 1/b)/2``: shift by the larger period first, then the
  smaller one, multiplying the shift factors.
* Inside the working strip the line integral is done with a uniform
  trapezoid rule, which converges geometrically for this analytic integrand.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NearSingularity

PI = math.pi
EXCLUSION_FACTOR = 1e-6
_TAIL = 39.0  # e^-39 ~ 1e-17 tail mass at the truncation ends
_ALIAS = 44.0  # aliasing error ~ e^-44 times the t = 0 pole strength
_LOG_RANGE = 600.0  # largest exponent magnitude kept on the line


@dataclass(frozen=True)
class ModularParams:
    """
    Parameter bundle fixed by the modulus ``b``.

    Attributes
    ----------
    b : float
        Positive modulus.
    omega, omega_prime, omega_dprime : complex
        Half-periods ``i b/2``, ``i/(2b)`` and their sum.
    tau : float
        ``omega_prime / omega = 1/b^2``.
    q, q_tilde : complex
        ``exp(i pi tau)`` and ``exp(i pi / tau)``.
    beta : float
        ``(pi/12)(tau + 1/tau)``.
    c : complex
        ``exp(i beta + i pi/4)``.
    """

    b: float = 0.8

    def __post_init__(self):
        if not (isinstance(self.b, (int, float)) and math.isfinite(self.b) and self.b > 0):
            raise ValueError(f"modulus b must be a positive real, got {self.b!r}")
        object.__setattr__(self, "b", float(self.b))

    @property
    def omega(self) -> complex:
        return 0.5j * self.b

    @property
    def omega_prime(self) -> complex:
        return 0.5j / self.b

    @property
    def omega_dprime(self) -> complex:
        return self.omega + self.omega_prime

    @property
    def Q(self) -> float:
        return self.b + 1.0 / self.b

    @property
    def tau(self) -> float:
        return 1.0 / (self.b * self.b)

    @property
    def q(self) -> complex:
        return complex(np.exp(1j * PI * self.tau))

    @property
    def q_tilde(self) -> complex:
        return complex(np.exp(1j * PI / self.tau))

    @property
    def beta(self) -> float:
        return PI / 12.0 * (self.tau + 1.0 / self.tau)

    @property
    def c(self) -> complex:
        return complex(np.exp(1j * self.beta + 0.25j * PI))

    @property
    def small(self) -> float:
        """``min(b, 1/b)``."""
        return min(self.b, 1.0 / self.b)

    @property
    def large(self) -> float:
        """``max(b, 1/b)``."""
        return max(self.b, 1.0 / self.b)

    @property
    def dual(self) -> "ModularParams":
        """Parameters with ``b -> 1/b`` (``omega`` and ``omega'`` exchanged)."""
        return ModularParams(1.0 / self.b)

    @property
    def exclusion_radius(self) -> float:
        return EXCLUSION_FACTOR * abs(self.omega_dprime)

    def to_dict(self) -> dict:
        return {"b": self.b}


class Strategy(enum.Enum):
    StripIntegral = "StripIntegral"
    ShiftContinuation = "ShiftContinuation"
    ReflectionContinuation = "ReflectionContinuation"


@dataclass(frozen=True)
class GammaValue:
    """Result of one gamma evaluation.

    ``shift_count`` counts continuation steps, a reflection counting as one.
    """

    value: complex
    abs_log_error: float
    strategy: Strategy
    shift_count: int

    def __complex__(self):
        return complex(self.value)


class PoleKind(enum.Enum):
    Pole = "Pole"
    Zero = "Zero"


@dataclass(frozen=True)
class PoleDatum:
    location: complex
    kind: PoleKind
    leading_coefficient: complex


# --------------------------------------------------------------------------- #
#  strip integral
# --------------------------------------------------------------------------- #
_BLOCK = 16


@lru_cache(maxsize=64)
def _strip_rule(b: float, h: float, T: float, eta: float):
    """Trapezoid weights on ``Im t = eta`` arranged for blocked phase evaluation.

    ``g(t) = 1/(t sin(omega t) sin(omega' t))`` is sampled at ``±h k + i eta``.
    Index ``k = B j + r`` is split so that ``exp(i h k x)`` factors as
    ``exp(i h r x) exp(i h B j x)``; the sums over ``k`` then become small
    matrix products. Weights are returned as ``(B, J)`` matrices for the
    ``+k`` and ``-k`` nodes, the node ``k = 0`` sitting in the ``+`` matrix.
    """
    n = int(math.ceil(T / h))
    J = (n + _BLOCK) // _BLOCK
    k = np.arange(J * _BLOCK)
    w, wp = 0.5j * b, 0.5j / b

    def g(t):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            v = 1.0 / (t * np.sin(w * t) * np.sin(wp * t))
        return np.where(np.isfinite(v), v, 0.0)

    live = k <= n
    cp = np.where(live, g(h * k + 1j * eta), 0.0)
    cm = np.where(live & (k > 0), g(-h * k + 1j * eta), 0.0)
    even = (k % 2 == 0)
    # (J, B) layout reshaped to (B, J): row r, column j holds k = B j + r
    mats = [c.reshape(J, _BLOCK).T.copy() for c in (cp, cm, cp * even, cm * even)]
    return J, mats


def _strip_log_gamma(x: np.ndarray, params: ModularParams, eta: float | None = None):
    """log gamma on the working strip, with an error estimate per point."""
    m = params.small
    eta = 0.25 * 2 * PI * m if eta is None else eta
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return x.copy(), np.zeros(0)
    rate = 0.5 * params.Q - np.max(np.abs(x.imag))
    if rate <= 0:
        raise ValueError("strip integral requested outside |Im x| < Q/2")
    # cap T where |g| underflows; the tail beyond is charged to the error
    T = min(_TAIL / rate, _LOG_RANGE / (0.5 * params.Q))
    tail = 8.0 * math.exp(-rate * T) / (rate * T)
    # aliasing error ~ exp(-eta (2 pi / h - |Re x|)) from the t = 0 pole at depth eta
    xr = float(np.max(np.abs(x.real)))
    h = float(f"{2 * PI / (_ALIAS / eta + xr):.3g}")
    T = float(f"{T:.3g}")
    J, (Gp, Gm, Gpe, Gme) = _strip_rule(params.b, h, T, eta)
    flat = x.ravel()
    r = np.arange(_BLOCK)[:, None]
    j = np.arange(J)[:, None]
    out = np.empty(flat.shape, dtype=complex)
    err = np.empty(flat.shape)
    chunk = 4096
    for s in range(0, flat.size, chunk):
        xs = flat[s : s + chunk]
        A = np.exp(1j * h * r * xs)
        Bm = np.exp(1j * h * _BLOCK * j * xs)
        Ai, Bi = 1.0 / A, 1.0 / Bm
        tp = (Gp.T @ A) * Bm
        tm = (Gm.T @ Ai) * Bi
        full = tp.sum(axis=0) + tm.sum(axis=0)
        half = ((Gpe.T @ A) * Bm).sum(axis=0) + ((Gme.T @ Ai) * Bi).sum(axis=0)
        absum = np.abs(tp).sum(axis=0) + np.abs(tm).sum(axis=0)
        pref = -0.25 * h * np.exp(-eta * xs)
        val = pref * full
        d = np.abs(val - 2.0 * pref * half)
        out[s : s + chunk] = val
        # the coarse rule error is roughly the square root of the fine one
        err[s : s + chunk] = (np.minimum(d, d * d) + 64 * np.finfo(float).eps * np.abs(pref) * absum
                              + np.abs(pref) * tail)
    return out.reshape(x.shape), err.reshape(x.shape)


# --------------------------------------------------------------------------- #
#  singular lattice
# --------------------------------------------------------------------------- #
def nearest_lattice_point(z, params: ModularParams):
    """Nearest pole or zero of gamma to each ``z`` and its distance.

    Poles sit at ``-omega'' - 2m omega - 2n omega'`` and zeros at the negatives,
    ``m, n >= 0``, all on the imaginary axis.
    """
    z = np.asarray(z, dtype=complex)
    y = np.abs(z.imag) - 0.5 * params.Q
    b, ib = params.b, 1.0 / params.b
    best = np.full(z.shape, np.inf)
    nmax = int(max(0.0, float(np.max(y, initial=0.0))) * params.b) + 2
    for n in range(nmax + 1):
        mm = np.maximum(np.round((y - n * ib) / b), 0)
        cand = mm * b + n * ib
        best = np.where(np.abs(cand - y) < np.abs(best - y), cand, best)
    loc = 1j * np.sign(z.imag + (z.imag == 0)) * (best + 0.5 * params.Q)
    return loc, np.abs(z - loc)


def _check_singular(z: np.ndarray, params: ModularParams, factor: str = ""):
    loc, dist = nearest_lattice_point(z, params)
    bad = dist < params.exclusion_radius
    if np.any(bad):
        i = np.argwhere(np.atleast_1d(bad))[0][0]
        L = complex(np.atleast_1d(loc)[i])
        kind = "pole" if L.imag < 0 else "zero"
        raise NearSingularity(
            f"argument {complex(np.atleast_1d(z)[i]):.6g} within exclusion radius of "
            f"gamma {kind} at {L:.6g}" + (f" in factor {factor}" if factor else ""),
            location=L,
            factor=factor,
        )


# --------------------------------------------------------------------------- #
#  continuation
# --------------------------------------------------------------------------- #
def _log_one_plus_exp(w):
    """``log(1 + e^w)`` accurate near the zeros ``w = i pi (2k+1)``."""
    k = np.round((w.imag / PI - 1.0) / 2.0)
    wr = w - 1j * PI * (2 * k + 1)
    return np.log(-np.expm1(wr))


def _shift_log_factors(z, n, p, d):
    """Sum of log shift factors taking ``gamma(z - 2 n p)`` to ``gamma(z)``.

    Uses ``gamma(x + p)/gamma(x - p) = 1 + exp(-i pi x / d)``; ``n`` may be
    negative (upward shifts) and is per element. Returns the sum and the
    landing point ``z - 2 n p``.
    """
    nmax = int(np.max(np.abs(n), initial=0))
    if nmax == 0:
        return np.zeros(z.shape, dtype=complex), z.copy()
    sgn = np.sign(n)
    j = np.arange(nmax)
    live = j[None, :] < np.abs(n)[:, None]
    idx = np.nonzero(np.any(live, axis=1))[0]
    zz, ss, lv = z[idx], sgn[idx], live[idx]
    x = zz[:, None] - ss[:, None] * p * (1 + 2 * j[None, :])
    terms = np.where(lv, _log_one_plus_exp(-1j * PI * x / d), 0.0)
    acc = np.zeros(z.shape, dtype=complex)
    acc[idx] = ss * terms.sum(axis=1)
    return acc, z - 2 * n * p


def log_gamma_array(z, params: ModularParams, strategy: str = "auto", check: bool = True,
                    factor: str = ""):
    """
    Vectorized ``log gamma`` with per-point diagnostics.

    Parameters
    ----------
    z : array_like of complex
    params : ModularParams
    strategy : {"auto", "strip", "shift"}
        ``"strip"`` forces the direct integral for every point of the open strip;
        ``"shift"`` forces at least one shift away from and back into the
        working strip.
    check : bool
        Raise NearSingularity for points inside an exclusion disc.

    Returns
    -------
    logval : ndarray of complex
        ``log gamma(z)`` on an unspecified branch; only ``exp`` of it is meaningful.
    err : ndarray of float
        Estimated absolute error of ``logval``.
    steps : ndarray of int
        Continuation steps taken (reflection counts as one).
    reflected : ndarray of bool
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    if check:
        _check_singular(z, params, factor)
    reflected = z.real < 0
    zz = np.where(reflected, -z, z)
    M, m = params.large, params.small
    # period of size M and of size m, and their dual half-periods
    if params.b >= 1:
        pM, dM, pm, dm = params.omega, params.omega_prime, params.omega_prime, params.omega
    else:
        pM, dM, pm, dm = params.omega_prime, params.omega, params.omega, params.omega_prime
    y = zz.imag
    if strategy == "strip":
        if np.any(np.abs(y) >= 0.5 * params.Q):
            raise ValueError("strip strategy requires |Im z| < Q/2")
        nM = np.zeros(z.shape, dtype=int)
        nm = np.zeros(z.shape, dtype=int)
    else:
        nM = np.round(y / M).astype(int)
        y1 = y - nM * M
        nm = np.round(y1 / m).astype(int)
        if strategy == "shift":
            zero = (nM == 0) & (nm == 0)
            nm = np.where(zero, np.where(y1 >= 0, 1, -1), nm)
        elif strategy != "auto":
            raise ValueError(f"unknown strategy {strategy!r}")
    accM, cur = _shift_log_factors(zz, nM, pM, dM)
    accm, cur = _shift_log_factors(cur, nm, pm, dm)
    core, err = _strip_log_gamma(cur, params)
    logval = core + accM + accm
    steps = np.abs(nM) + np.abs(nm)
    err = err + 4e-16 * steps * (1 + np.abs(accM + accm))
    refl = 1j * params.beta + 1j * PI * z * z
    logval = np.where(reflected, refl - logval, logval)
    err = err + np.where(reflected, 4e-16 * (1 + PI * np.abs(z) ** 2), 0.0)
    steps = steps + reflected
    return (logval.reshape(shape), err.reshape(shape), steps.reshape(shape),
            reflected.reshape(shape))


def gamma_array(z, params: ModularParams, factor: str = "") -> np.ndarray:
    """Vectorized ``gamma(z)`` values."""
    lv = log_gamma_array(z, params, factor=factor)[0]
    return np.exp(lv)


def gamma(z: complex, params: ModularParams | None = None, strategy: str = "auto") -> GammaValue:
    """
    Evaluate ``gamma(z)``.

    Parameters
    ----------
    z : complex
    params : ModularParams, optional
        Defaults to ``b = 0.8``.
    strategy : {"auto", "strip", "shift"}

    Returns
    -------
    GammaValue

    Raises
    ------
    NearSingularity
        ``z`` within ``1e-6 |omega''|`` of a pole or zero.
    """
    params = params or ModularParams()
    lv, err, steps, refl = log_gamma_array(np.array([z]), params, strategy)
    n = int(steps[0])
    if bool(refl[0]):
        strat = Strategy.ReflectionContinuation
    elif n > 0:
        strat = Strategy.ShiftContinuation
    else:
        strat = Strategy.StripIntegral
    return GammaValue(complex(np.exp(lv[0])), float(err[0]), strat, n)


def phi_of_x(x: complex, params: ModularParams | None = None) -> complex:
    """``Phi(u)`` at ``u = exp(-i pi x / omega)``, parametrized by ``x`` only."""
    return gamma(x, params).value


def reflection_product(z: complex, params: ModularParams | None = None) -> complex:
    """Closed form of ``gamma(z) gamma(-z) = exp(i beta) exp(i pi z^2)``."""
    params = params or ModularParams()
    return complex(np.exp(1j * params.beta + 1j * PI * z * z))


def conjugation_check(z: complex, params: ModularParams | None = None) -> float:
    """Residual ``|conj(gamma(z)) gamma(conj(z)) - 1|``."""
    params = params or ModularParams()
    g = gamma_array(np.array([z, np.conj(z)]), params)
    return float(abs(np.conj(g[0]) * g[1] - 1.0))


def pole_expansion(which: str, params: ModularParams | None = None) -> PoleDatum:
    """
    Location and leading Laurent/Taylor coefficient at the base pole or zero.

    ``gamma(-omega'' + z) = -1/(2 pi i c) / z + ...`` and
    ``gamma(omega'' + z) = (2 pi i / c) z + ...``.
    """
    params = params or ModularParams()
    key = which.value if isinstance(which, enum.Enum) else str(which)
    if key == "BasePole":
        return PoleDatum(-params.omega_dprime, PoleKind.Pole, -1.0 / (2j * PI * params.c))
    if key == "BaseZero":
        return PoleDatum(params.omega_dprime, PoleKind.Zero, 2j * PI / params.c)
    raise ValueError(f"unknown lattice point {which!r}")


def fit_leading_coefficient(which: str, params: ModularParams | None = None,
                            radius: float = 1e-3, npts: int = 16, degree: int = 4) -> complex:
    """
    Least-squares fit of the leading coefficient from gamma on a small circle.

    The base zero is fit by ``sum_k a_k z^k`` (``k = 1..degree``) and the base
    pole by ``sum_k a_k z^k`` (``k = -1..degree-2``); the ``k = ±1`` coefficient
    is returned.
    """
    params = params or ModularParams()
    datum = pole_expansion(which, params)
    zc = radius * np.exp(2j * PI * np.arange(npts) / npts)
    vals = gamma_array(datum.location + zc, params)
    if datum.kind is PoleKind.Zero:
        powers = np.arange(1, degree + 1)
    else:
        powers = np.arange(-1, degree - 1)
    A = zc[:, None] ** powers[None, :]
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    return complex(coef[0])
