"""
Representation pi_s of the modular double on Gaussian-times-polynomial functions.

Test functions are finite sums of terms ``exp(-a.x^2 + b.x) P(x)`` in one or
more variables. Shifts by complex amounts, multiplication by exponentials and
the Fourier transform map this family to itself, so every operator word built
from ``u, v, u~, v~`` and the Fourier transform acts exactly.

Operator words are written as products read left to right, ``(L1, L2, L3)``
meaning ``L1 L2 L3``; acting on a function the rightmost letter acts first.
Equivalently, evaluating ``(L1 L2 L3) f`` at a point walks the letters left to
right, shifting the point and collecting exponential factors, and finally
evaluates ``f`` at the moved point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeOverflow, DomainViolation
from .qdilog import ModularParams
from .reports import ResidualReport

N_MAX = 12
PI = math.pi


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class _Term:
    alpha: tuple
    beta: tuple
    coeffs: np.ndarray = field(compare=False)

    @property
    def key(self):
        return (self.alpha, self.beta)


class TestFunction:
    """
    Finite sum of terms ``exp(sum_k -alpha_k x_k^2 + beta_k x_k) P(x_1, .., x_n)``.

    A single-variable single-term function exposes ``alpha``, ``beta_lin`` and
    ``poly`` (ascending coefficients). Instances are immutable.

    Examples
    --------
    >>> f = TestFunction.gaussian(1.0)
    >>> abs(f(0.0) - 1.0) < 1e-15
    True
    """

    __test__ = False  # not a pytest class

    def __init__(self, terms, nvars: int):
        self._terms = tuple(terms)
        self.nvars = int(nvars)

    @classmethod
    def gaussian(cls, alpha=1.0, beta_lin=0.0, poly=(1.0,)) -> "TestFunction":
        alpha = complex(alpha)
        if not alpha.real > 0:
            raise DomainViolation(f"Re alpha must be positive, got {alpha}")
        coeffs = np.array(poly, dtype=complex).reshape(-1)
        if coeffs.size == 0:
            coeffs = np.zeros(1, complex)
        if coeffs.size - 1 > N_MAX:
            raise DegreeOverflow(f"degree {coeffs.size - 1} exceeds N_max = {N_MAX}")
        return cls([_Term((alpha,), (complex(beta_lin),), coeffs)], 1)

    @classmethod
    def zero(cls, nvars: int = 1) -> "TestFunction":
        return cls([], nvars)

    # single-term accessors
    def _single(self) -> _Term:
        if len(self._terms) != 1 or self.nvars != 1:
            raise ValueError("alpha/beta_lin/poly are defined for one-variable single terms")
        return self._terms[0]

    @property
    def alpha(self) -> complex:
        return self._single().alpha[0]

    @property
    def beta_lin(self) -> complex:
        return self._single().beta[0]

    @property
    def poly(self) -> np.ndarray:
        return self._single().coeffs.copy()

    @property
    def terms(self):
        return self._terms

    def degree(self) -> int:
        return max((max(t.coeffs.shape) - 1 for t in self._terms), default=0)

    def __repr__(self):
        return f"TestFunction(nvars={self.nvars}, terms={len(self._terms)}, degree={self.degree()})"

    # -- evaluation ----------------------------------------------------------

    def __call__(self, *xs):
        """Evaluate at points; one array per variable, broadcast together."""
        if len(xs) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinate arrays, got {len(xs)}")
        xs = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in xs))
        out = np.zeros(xs[0].shape, complex)
        for t in self._terms:
            expo = sum(-a * x * x + b * x for a, b, x in zip(t.alpha, t.beta, xs))
            out += np.exp(expo) * _polyval_nd(t.coeffs, xs)
        return out[()] if out.ndim == 0 else out

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "TestFunction") -> "TestFunction":
        if not isinstance(other, TestFunction):
            return NotImplemented
        if other.nvars != self.nvars:
            raise ValueError("cannot add functions of different arity")
        return _merge(self._terms + other._terms, self.nvars)

    def __mul__(self, c) -> "TestFunction":
        c = complex(c)
        return TestFunction([_Term(t.alpha, t.beta, c * t.coeffs) for t in self._terms], self.nvars)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def tensor(self, other: "TestFunction") -> "TestFunction":
        """Product ``f(x_1..x_n) g(x_{n+1}..x_{n+m})``."""
        terms = []
        for s in self._terms:
            for t in other._terms:
                terms.append(_Term(s.alpha + t.alpha, s.beta + t.beta, np.multiply.outer(s.coeffs, t.coeffs)))
        return _merge(terms, self.nvars + other.nvars)

    def shift(self, var: int, c) -> "TestFunction":
        """``f(.., x_var + c, ..)``, exact by completing the square."""
        c = complex(c)
        terms = []
        for t in self._terms:
            a, b = t.alpha[var], t.beta[var]
            beta = list(t.beta)
            beta[var] = b - 2 * a * c
            coeffs = _along(t.coeffs, var, _shift_matrix(t.coeffs.shape[var], c))
            terms.append(_Term(t.alpha, tuple(beta), np.exp(-a * c * c + b * c) * coeffs))
        return _merge(terms, self.nvars)

    def mul_exp(self, var: int, kappa) -> "TestFunction":
        """``exp(kappa x_var) f``."""
        kappa = complex(kappa)
        terms = []
        for t in self._terms:
            beta = list(t.beta)
            beta[var] += kappa
            terms.append(_Term(t.alpha, tuple(beta), t.coeffs))
        return _merge(terms, self.nvars)

    def mul_poly(self, var: int, poly) -> "TestFunction":
        """``P(x_var) f`` for ascending coefficients ``poly``."""
        p = np.asarray(poly, dtype=complex).reshape([-1 if k == var else 1 for k in range(self.nvars)])
        terms = []
        for t in self._terms:
            c = _polymul_nd(t.coeffs, p)
            if c.shape[var] - 1 > N_MAX:
                raise DegreeOverflow(f"degree {c.shape[var] - 1} exceeds N_max = {N_MAX}")
            terms.append(_Term(t.alpha, t.beta, c))
        return _merge(terms, self.nvars)

    def fourier(self, var: int, sign: int = -1) -> "TestFunction":
        """
        Closed-form transform ``int dy exp(2 pi i sign k y) f(.., y, ..)`` in slot ``var``.

        ``sign = -1`` is the forward transform ``F`` and ``sign = +1`` its inverse.
        """
        lam = 2j * PI * sign
        terms = []
        for t in self._terms:
            a, b = t.alpha[var], t.beta[var]
            n = t.coeffs.shape[var]
            alpha, beta = list(t.alpha), list(t.beta)
            alpha[var] = -lam * lam / (4 * a)
            beta[var] = b * lam / (2 * a)
            pref = np.sqrt(PI / a) * np.exp(b * b / (4 * a))
            coeffs = _along(t.coeffs, var, _moment_matrix(n, a, b, lam))
            terms.append(_Term(tuple(alpha), tuple(beta), pref * coeffs))
        return _merge(terms, self.nvars)

    def inner_product(self) -> complex:
        """Closed-form integral of the function over real ``R^n``."""
        total = 0j
        for t in self._terms:
            c = t.coeffs
            for k in range(self.nvars):
                a, b = t.alpha[k], t.beta[k]
                # moments int y^m exp(-a y^2 + b y) dy at zero frequency
                h = _moment_matrix(c.shape[k], a, b, 0.0)[0]
                c = np.tensordot(c, h * np.sqrt(PI / a) * np.exp(b * b / (4 * a)), axes=([k], [0]))
                c = np.expand_dims(c, k)
            total += complex(c.reshape(-1)[0])
        return total

    def conj(self) -> "TestFunction":
        """Complex conjugate on real arguments."""
        return TestFunction(
            [_Term(tuple(np.conj(t.alpha)), tuple(np.conj(t.beta)), np.conj(t.coeffs)) for t in self._terms],
            self.nvars,
        )

    def norm2(self) -> float:
        """Closed-form ``int |f|^2`` over real arguments."""
        prod = _pointwise_product(self.conj(), self)
        return float(prod.inner_product().real)


def _pointwise_product(f: TestFunction, g: TestFunction) -> TestFunction:
    terms = []
    for s in f.terms:
        for t in g.terms:
            coeffs = _polymul_nd(s.coeffs, t.coeffs)
            terms.append(_Term(tuple(np.add(s.alpha, t.alpha)), tuple(np.add(s.beta, t.beta)), coeffs))
    return _merge(terms, f.nvars)


def _polymul_nd(a, b):
    shape = tuple(i + j - 1 for i, j in zip(a.shape, b.shape))
    out = np.zeros(shape, complex)
    for idx in np.ndindex(*a.shape):
        if a[idx] == 0:
            continue
        sl = tuple(slice(i, i + n) for i, n in zip(idx, b.shape))
        out[sl] += a[idx] * b
    return out


def _merge(terms, nvars) -> TestFunction:
    acc = {}
    for t in terms:
        k = t.key
        acc[k] = _padd(acc[k], t.coeffs) if k in acc else t.coeffs
    out = [_Term(k[0], k[1], c) for k, c in acc.items() if np.any(c != 0)]
    return TestFunction(out, nvars)


def _padd(a, b):
    shape = tuple(max(i, j) for i, j in zip(a.shape, b.shape))
    out = np.zeros(shape, complex)
    out[tuple(slice(0, n) for n in a.shape)] += a
    out[tuple(slice(0, n) for n in b.shape)] += b
    return out


_LETTERS = "abcdefghij"


def _polyval_nd(coeffs, xs):
    n = len(xs)
    powers = [x[..., None] ** np.arange(coeffs.shape[k]) for k, x in enumerate(xs)]
    sub = _LETTERS[:n] + "," + ",".join("..." + _LETTERS[k] for k in range(n)) + "->..."
    return np.einsum(sub, coeffs, *powers)


def _along(coeffs, axis, mat):
    """Apply ``new[n] = sum_m mat[n, m] old[m]`` along ``axis``."""
    out = np.tensordot(mat, coeffs, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def _shift_matrix(n, c):
    """``mat[i, j] = C(j, i) c^(j - i)``: coefficients of ``P(x + c)`` from those of ``P``."""
    m = np.zeros((n, n), complex)
    for j in range(n):
        for i in range(j + 1):
            m[i, j] = math.comb(j, i) * c ** (j - i)
    return m


def _hermite_matrix(n, a):
    """
    ``mat[i, m]`` = coefficient of ``g^i`` in ``H_m(g)``, where
    ``int y^m exp(-a y^2 + g y) dy = sqrt(pi/a) exp(g^2/4a) H_m(g)``.
    """
    mat = np.zeros((n, n), complex)
    h = np.zeros(n, complex)
    h[0] = 1.0
    for m in range(n):
        mat[:, m] = h
        nxt = np.zeros(n, complex)
        nxt[1:] = h[:-1] / (2 * a)
        nxt[:-1] += h[1:] * np.arange(1, n)
        h = nxt
    return mat


def _moment_matrix(n, a, b, lam):
    """``H_m(b + lam k)`` as polynomials in k (``mat[j, m]`` multiplies ``k^j``)."""
    m = _shift_matrix(n, b) @ _hermite_matrix(n, a)
    return (lam ** np.arange(n))[:, None] * m


# ---------------------------------------------------------------------------
# operator words


@dataclass(frozen=True)
class Letter:
    """
    One elementary operator acting on slot ``var``.

    ``kind`` is ``"mul"`` (multiply by ``exp(param x)``), ``"shift"``
    (``x -> x + param``) or ``"fourier"`` (``param = -1`` forward, ``+1`` inverse).
    """

    kind: str
    var: int
    param: complex

    def act(self, f: TestFunction) -> TestFunction:
        if self.kind == "mul":
            return f.mul_exp(self.var, self.param)
        if self.kind == "shift":
            return f.shift(self.var, self.param)
        if self.kind == "fourier":
            return f.fourier(self.var, int(self.param.real))
        raise ValueError(f"unknown letter kind {self.kind!r}")


def _mul(var, kappa):
    return Letter("mul", var, complex(kappa))


def _shift(var, c):
    return Letter("shift", var, complex(c))


class OpExpr:
    """
    Linear combination of operator words with complex coefficients.

    ``A * B`` is the composition ``A B`` (``B`` acts first). Scalars multiply
    from either side.
    """

    def __init__(self, words=None):
        self.words: dict = {}
        for w, c in (words or {}).items():
            c = complex(c)
            if c != 0:
                self.words[tuple(w)] = self.words.get(tuple(w), 0) + c

    @classmethod
    def identity(cls) -> "OpExpr":
        return cls({(): 1.0})

    @classmethod
    def scalar(cls, c) -> "OpExpr":
        return cls({(): c})

    @classmethod
    def letter(cls, letter: Letter) -> "OpExpr":
        return cls({(letter,): 1.0})

    def __add__(self, other):
        other = _lift(other)
        out = dict(self.words)
        for w, c in other.words.items():
            out[w] = out.get(w, 0) + c
        return OpExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return OpExpr({w: -c for w, c in self.words.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, OpExpr):
            c = complex(other)
            return OpExpr({w: c * v for w, v in self.words.items()})
        out: dict = {}
        for w1, c1 in self.words.items():
            for w2, c2 in other.words.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return OpExpr(out)

    def __rmul__(self, other):
        c = complex(other)
        return OpExpr({w: c * v for w, v in self.words.items()})

    def __len__(self):
        return len(self.words)

    def __repr__(self):
        return f"OpExpr({len(self.words)} words)"

    @property
    def nvars(self) -> int:
        return 1 + max((l.var for w in self.words for l in w), default=0)

    def shifted_vars(self, offset: int) -> "OpExpr":
        """Same operator acting on slots ``var + offset``."""
        return OpExpr({tuple(Letter(l.kind, l.var + offset, l.param) for l in w): c for w, c in self.words.items()})


def _lift(x) -> OpExpr:
    return x if isinstance(x, OpExpr) else OpExpr.scalar(x)


def apply(word: OpExpr, f: TestFunction) -> TestFunction:
    """
    Exact action of an operator expression on a test function.

    Raises
    ------
    DegreeOverflow
        If a polynomial degree would exceed ``N_MAX``.
    """
    out = TestFunction.zero(f.nvars)
    for w, c in word.words.items():
        g = f
        for letter in reversed(w):
            g = letter.act(g)
        out = out + c * g
    return out


def evaluate(word: OpExpr, func, points, with_scale: bool = False):
    """
    Value of ``(word func)`` at ``points`` for any pointwise-evaluable ``func``.

    Only multiplication and shift letters are allowed. ``func`` is called
    once with one array per variable. ``points`` has shape ``(npts, nvars)``
    or ``(npts,)`` for one variable. With ``with_scale`` the sum of the moduli
    of the individual word contributions is returned as well.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    npts, nv = pts.shape
    moved, factors, coeffs = [], [], []
    for w, c in word.words.items():
        x = pts.copy()
        fac = np.ones(npts, complex)
        for letter in w:
            if letter.kind == "mul":
                fac *= np.exp(letter.param * x[:, letter.var])
            elif letter.kind == "shift":
                x[:, letter.var] += letter.param
            else:
                raise ValueError("pointwise evaluation supports multiplication and shift letters only")
        moved.append(x)
        factors.append(fac)
        coeffs.append(c)
    if not moved:
        z = np.zeros(npts, complex)
        return (z, np.zeros(npts)) if with_scale else z
    allpts = np.concatenate(moved)
    vals = np.asarray(func(*[allpts[:, k] for k in range(nv)]), dtype=complex).reshape(len(moved), npts)
    contrib = np.array(coeffs)[:, None] * np.array(factors) * vals
    total = contrib.sum(axis=0)
    if with_scale:
        return total, np.abs(contrib).sum(axis=0)
    return total


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class SpinLabel:
    """Real spin ``s`` with ``Z = exp(-i pi s / omega)`` and ``Z~ = exp(-i pi s / omega')``."""

    s: float

    def __post_init__(self):
        if isinstance(self.s, complex) or not np.isreal(self.s):
            raise DomainViolation(f"spin must be real, got {self.s}")
        object.__setattr__(self, "s", float(np.real(self.s)))

    def Z(self, params: ModularParams) -> complex:
        return complex(np.exp(-1j * PI * self.s / params.omega))

    def Z_tilde(self, params: ModularParams) -> complex:
        return complex(np.exp(-1j * PI * self.s / params.omega_prime))


class Kind(enum.Enum):
    E = "E"
    F = "F"
    K = "K"
    E_tilde = "E_tilde"
    F_tilde = "F_tilde"
    K_tilde = "K_tilde"
    e_small = "e_small"
    f_small = "f_small"
    e_primed = "e_primed"
    f_primed = "f_primed"
    K_primed = "K_primed"


def _half_periods(params: ModularParams, dual: bool):
    if dual:
        return params.omega_prime, params.omega, params.q_tilde
    return params.omega, params.omega_prime, params.q


def u_op(params: ModularParams, var: int = 0, power: int = 1, dual: bool = False) -> OpExpr:
    """``u^power``: multiplication by ``exp(-i pi power x / omega)``; ``u~`` when ``dual``."""
    w, _, _ = _half_periods(params, dual)
    return OpExpr.letter(_mul(var, -1j * PI * power / w))


def v_op(params: ModularParams, var: int = 0, power: int = 1, dual: bool = False) -> OpExpr:
    """``v^power``: shift ``x -> x + 2 power omega'``; ``v~`` shifts by ``2 power omega``."""
    _, wp, _ = _half_periods(params, dual)
    return OpExpr.letter(_shift(var, 2 * power * wp))


def fourier_op(var: int = 0, inverse: bool = False) -> OpExpr:
    """``F`` with kernel ``exp(-2 pi i x y)``, or its inverse."""
    return OpExpr.letter(Letter("fourier", var, 1.0 if inverse else -1.0))


def _as_spin(s) -> SpinLabel:
    return s if isinstance(s, SpinLabel) else SpinLabel(s)


def generator(kind, s, params: ModularParams | None = None, var: int = 0, ordering: int = 0,
              dual: bool = False) -> OpExpr:
    """
    Operator word of a generator of pi_s acting on slot ``var``.

    Parameters
    ----------
    kind : Kind or str
        ``E, F, K`` and their tilde copies, the unnormalized ``e_small``,
        ``f_small``, and the transposed ``e_primed, f_primed, K_primed``
        (``u' = u``, ``v' = v^-1``).
    s : float or SpinLabel
    ordering : {0, 1}
        Which of the two equivalent factorizations to build: 0 puts ``u^-1``
        (or ``u``) on the left, 1 on the right.
    dual : bool
        Build the copy with ``omega`` and ``omega'`` interchanged. The tilde
        kinds set this automatically.
    """
    params = params or ModularParams()
    kind = Kind(kind) if not isinstance(kind, Kind) else kind
    s = _as_spin(s)
    if kind in (Kind.E_tilde, Kind.F_tilde, Kind.K_tilde):
        dual = not dual
        kind = Kind(kind.value[0])
    w, _, q = _half_periods(params, dual)
    Z = complex(np.exp(-1j * PI * s.s / w))
    u = lambda p=1: u_op(params, var, p, dual)
    v = lambda p=1: v_op(params, var, p, dual)
    one = OpExpr.identity()
    if kind is Kind.K:
        return v()
    if kind is Kind.K_primed:
        return v(-1)
    if kind in (Kind.e_small, Kind.E):
        e = u(-1) * (q * v() + Z) if ordering == 0 else ((1 / q) * v() + Z) * u(-1)
        return e if kind is Kind.e_small else _normalization(q) * e
    if kind in (Kind.f_small, Kind.F):
        f = u() * (one + (q / Z) * v(-1)) if ordering == 0 else (one + (1 / (q * Z)) * v(-1)) * u()
        return f if kind is Kind.f_small else _normalization(q) * f
    if kind is Kind.e_primed:
        return u(-1) * (Z + (1 / q) * v(-1)) if ordering == 0 else (Z + q * v(-1)) * u(-1)
    if kind is Kind.f_primed:
        return u() * (one + (1 / (q * Z)) * v()) if ordering == 0 else (one + (q / Z) * v()) * u()
    raise ValueError(f"unhandled generator {kind}")


def _normalization(q: complex) -> complex:
    d = q - 1 / q
    if abs(d) < 1e-12:
        raise DomainViolation("q - 1/q vanishes (tau integer); E and F are undefined, use e_small/f_small")
    return 1j / d


def coproduct_generator(kind, s1, s2, params: ModularParams | None = None, dual: bool = False) -> OpExpr:
    """
    Two-variable word of the coproduct acting on ``pi_s1 (x) pi_s2``.

    ``Delta(E) = E_1 K_2 + E_2``, ``Delta(F) = F_1 + K_1^-1 F_2`` and
    ``Delta(K) = K_1 K_2``; the same formulas hold for ``e_small``,
    ``f_small`` and, with ``dual``, for the tilde copy.
    """
    params = params or ModularParams()
    kind = Kind(kind) if not isinstance(kind, Kind) else kind
    if kind in (Kind.E_tilde, Kind.F_tilde, Kind.K_tilde):
        dual = not dual
        kind = Kind(kind.value[0])
    K1 = v_op(params, 0, 1, dual)
    K2 = v_op(params, 1, 1, dual)
    if kind is Kind.K:
        return K1 * K2
    if kind in (Kind.E, Kind.e_small):
        return generator(kind, s1, params, 0, dual=dual) * K2 + generator(kind, s2, params, 1, dual=dual)
    if kind in (Kind.F, Kind.f_small):
        return generator(kind, s1, params, 0, dual=dual) + v_op(params, 0, -1, dual) * generator(kind, s2, params, 1, dual=dual)
    raise ValueError(f"no coproduct for {kind}")


def relation_exprs(s, params: ModularParams | None = None) -> dict:
    """
    Named operator expressions that must vanish in pi_s.

    Covers the q-triple, the q~-triple, the cross commutators, the Weyl
    relations ``u v = q^2 v u`` (both copies) and the equality of the two
    factorizations of ``e`` and ``f`` and of the transposed ``e', f'``.
    """
    params = params or ModularParams()
    out = {}
    for tag, dual in (("", False), ("~", True)):
        q = params.q_tilde if dual else params.q
        E = generator(Kind.E, s, params, dual=dual)
        F = generator(Kind.F, s, params, dual=dual)
        K = generator(Kind.K, s, params, dual=dual)
        Ki = v_op(params, 0, -1, dual)
        out[f"KE-q2EK{tag}"] = K * E - q * q * E * K
        out[f"KF-q-2FK{tag}"] = K * F - (1 / (q * q)) * F * K
        out[f"[E,F]{tag}"] = E * F - F * E - _normalization(q) * (-1j) * (K - Ki)
        out[f"uv-q2vu{tag}"] = u_op(params, 0, 1, dual) * v_op(params, 0, 1, dual) - q * q * v_op(params, 0, 1, dual) * u_op(params, 0, 1, dual)
        for k in (Kind.e_small, Kind.f_small, Kind.e_primed, Kind.f_primed):
            out[f"{k.value}-orderings{tag}"] = generator(k, s, params, ordering=0, dual=dual) - generator(k, s, params, ordering=1, dual=dual)
    plain = {k.value: generator(k, s, params) for k in (Kind.E, Kind.F, Kind.K)}
    tilde = {k.value: generator(k, s, params) for k in (Kind.E_tilde, Kind.F_tilde, Kind.K_tilde)}
    for a, A in plain.items():
        for b_, B in tilde.items():
            out[f"[{a},{b_}~]"] = A * B - B * A
    return out


def _default_sample():
    return [
        TestFunction.gaussian(1.0),
        TestFunction.gaussian(0.7 + 0.2j, 0.3 - 0.1j, (1.0, 0.5, -0.25)),
    ]


def _default_points():
    return [0.3, -0.45 + 0.1j, 0.12 - 0.2j, 0.7, -0.9 + 0.05j]


def check_relations(s, sample=None, points=None, params: ModularParams | None = None) -> ResidualReport:
    """
    Residuals of the algebra relations of pi_s on closed-form test functions.

    Each relation ``X = 0`` is applied exactly to every sample function and
    evaluated at ``points``; the residual at a point is ``|X f|`` divided by
    ``max(1, sum of |word contributions|)``, so it measures roundoff relative
    to the size of the terms that cancel.
    """
    params = params or ModularParams()
    sample = _default_sample() if sample is None else list(sample)
    points = np.asarray(_default_points() if points is None else points, dtype=complex)
    details = {}
    for name, expr in relation_exprs(s, params).items():
        worst = 0.0
        for f in sample:
            worst = max(worst, _word_residual(expr, f, points))
        details[name] = worst
    s_val = _as_spin(s).s
    return ResidualReport(
        identity_id="relations", tag="EFK", parameters={"s": s_val, "b": params.b},
        details=details, metric="abs",
        condition="closed-form action on Gaussian-polynomial test functions",
    )


def coproduct_relation_exprs(s1, s2, params: ModularParams | None = None) -> dict:
    """The q-triple relations for the coproduct words on ``pi_s1 (x) pi_s2``, both copies."""
    params = params or ModularParams()
    out = {}
    for tag, dual in (("", False), ("~", True)):
        q = params.q_tilde if dual else params.q
        E, F, K = (coproduct_generator(k, s1, s2, params, dual) for k in (Kind.E, Kind.F, Kind.K))
        Ki = v_op(params, 0, -1, dual) * v_op(params, 1, -1, dual)
        out[f"D(KE-q2EK){tag}"] = K * E - q * q * E * K
        out[f"D(KF-q-2FK){tag}"] = K * F - (1 / (q * q)) * F * K
        out[f"D([E,F]){tag}"] = E * F - F * E - _normalization(q) * (-1j) * (K - Ki)
    return out


def check_coproduct(s1, s2, sample=None, points=None, params: ModularParams | None = None) -> ResidualReport:
    """Residuals of :func:`coproduct_relation_exprs` on two-variable test functions."""
    params = params or ModularParams()
    sample = [f.tensor(g) for f in _default_sample() for g in _default_sample()] if sample is None else list(sample)
    pts1 = np.asarray(_default_points(), dtype=complex)
    points = np.stack([pts1, pts1[::-1]], axis=1) if points is None else np.asarray(points, dtype=complex)
    details = {}
    for name, expr in coproduct_relation_exprs(s1, s2, params).items():
        details[name] = max(_word_residual(expr, f, points) for f in sample)
    return ResidualReport(
        identity_id="coproduct", tag="EFK",
        parameters={"s1": _as_spin(s1).s, "s2": _as_spin(s2).s, "b": params.b},
        details=details, metric="abs", condition="closed-form action on products of test functions",
    )


def _word_residual(expr: OpExpr, f: TestFunction, points) -> float:
    args = tuple(points.T) if points.ndim == 2 else (points,)
    vals = np.zeros(len(points), complex)
    scale = np.zeros(len(points))
    for w, c in expr.words.items():
        part = c * apply(OpExpr({w: 1.0}), f)(*args)
        vals += part
        scale += np.abs(part)
    return float(np.max(np.abs(vals) / np.maximum(1.0, scale)))


def fourier_conjugation_residuals(f: TestFunction | None = None, points=None,
                                  params: ModularParams | None = None) -> dict:
    """Residuals of ``F^-1 u F = v`` and ``F^-1 v F = u^-1`` on ``f``."""
    params = params or ModularParams()
    f = f or _default_sample()[1]
    points = np.asarray(_default_points() if points is None else points, dtype=complex)
    F, Fi = fourier_op(), fourier_op(inverse=True)
    u, v = u_op(params), v_op(params)
    return {
        "FiuF-v": _word_residual(Fi * u * F - v, f, points),
        "FivF-ui": _word_residual(Fi * v * F - u_op(params, power=-1), f, points),
    }
