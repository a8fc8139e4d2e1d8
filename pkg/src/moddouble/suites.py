"""
Verification suites behind ``moddouble check``.

A suite is a list of cases. Each case computes one residual, compares it
with a tolerance and names the equation tags it certifies. Cases run in
sorted key order, so reports are byte-identical for identical configs.
"""

from __future__ import annotations

import functools
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import identities as ident
from . import kashaev_spectral as ks
from . import threej
from .casimir_undressing import (TwoVarFunction, UndressingChain, casimir_apply, inverse_consistency,
                                 multiplier_unimodularity, psi_callable, substitution_residual,
                                 tilde_casimir, verify_composite, verify_undressing_chain)
from .errors import ConfigError, DomainViolation, SchemaMismatch
from .intertwiner import (IntertwinerSpec, inverse_residual, parseval_residual, unimodularity_residual,
                          verify_intertwining)
from .qdilog import ModularParams, fit_leading_coefficient, gamma_array, pole_expansion
from .quadrature import RegulatorLadder
from .reports import SCHEMA_VERSION, ResidualReport
from .weyl_rep import check_coproduct, check_relations, evaluate, fourier_conjugation_residuals, v_op

PI = math.pi
SUITES = ("dilog", "identities", "algebra", "intertwiner", "threej", "undressing", "spectral")

# equation tags that must be certified by at least one passing case
IN_SCOPE_TAGS = (
    "A", "AI", "Akern", "EFK", "F1", "F2", "FT1eps", "FT2eps", "FT3eps", "Phip", "S1", "S2", "S3", "S33",
    "Sp", "SysA", "System", "System1", "compl", "complex", "cond", "exp", "invF", "norm", "ort", "phi",
    "pole", "rec", "reflex", "sol",
)

DILOG_BS = (0.6, 0.8, 1.3)
TRIPLES = ((0.3, 0.5, 0.7), (0.2, 0.9, 0.4), (0.65, 0.15, 1.1))


# --------------------------------------------------------------------------- #
#  configuration
# --------------------------------------------------------------------------- #
@dataclass
class RunConfig:
    """
    Settings shared by ``eval``, ``check`` and ``report``.

    ``tolerances`` maps a suite name to a tolerance that replaces the default
    of every case in that suite.
    """

    b: float = 0.8
    seed: int = 7
    tolerances: dict = field(default_factory=dict)
    ladder: tuple = (4e-4, 2e-4, 1e-4)
    format: str = "json"
    out: str | None = None
    draws: int = 20

    def __post_init__(self):
        try:
            self.b = float(self.b)
            self.seed = int(self.seed)
            self.draws = int(self.draws)
            self.ladder = tuple(float(e) for e in self.ladder)
            self.tolerances = {str(k): float(v) for k, v in dict(self.tolerances).items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from exc
        if not (math.isfinite(self.b) and self.b > 0):
            raise ConfigError("b must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.draws < 1:
            raise ConfigError("draws must be at least 1")
        for suite, tol in self.tolerances.items():
            if suite not in SUITES:
                raise ConfigError(f"unknown suite {suite!r} in tolerance overrides")
            if not tol > 0:
                raise ConfigError(f"tolerance for {suite} must be positive")
        try:
            RegulatorLadder(self.ladder)
        except ValueError as exc:
            raise ConfigError(f"bad regulator ladder: {exc}") from exc

    @property
    def params(self) -> ModularParams:
        return ModularParams(self.b)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "b": self.b, "seed": self.seed,
                "tolerances": dict(sorted(self.tolerances.items())), "ladder": list(self.ladder),
                "format": self.format, "out": self.out, "draws": self.draws}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        version = d.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"config schema_version {version} is not {SCHEMA_VERSION}")
        known = {"b", "seed", "tolerances", "ladder", "format", "out", "draws"}
        unknown = set(d) - known - {"schema_version"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**{k: d[k] for k in known if k in d})

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


# --------------------------------------------------------------------------- #
#  cases and reports
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class Case:
    key: str
    tags: tuple
    tolerance: float
    run: Callable[[], ResidualReport]


@dataclass
class CaseResult:
    key: str
    tags: tuple
    tolerance: float
    report: ResidualReport | None = None
    error: str | None = None

    @property
    def residual(self) -> float:
        return self.report.residual if self.report is not None else math.inf

    @property
    def passed(self) -> bool:
        r = self.residual
        return self.error is None and math.isfinite(r) and r <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "key": self.key, "tags": list(self.tags), "tolerance": self.tolerance,
            "residual": _num(self.residual), "passed": self.passed, "error": self.error,
            "report": self.report.to_dict() if self.report is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CaseResult":
        if not isinstance(d, dict) or not {"key", "tags", "tolerance", "residual"} <= set(d):
            raise SchemaMismatch("case entry needs key, tags, tolerance and residual")
        rep = ResidualReport.from_dict(d["report"]) if d.get("report") is not None else None
        out = cls(d["key"], tuple(d["tags"]), float(d["tolerance"]), rep, d.get("error"))
        if rep is None and out.error is None:
            raise SchemaMismatch(f"case {d['key']} has neither report nor error")
        return out


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else ("nan" if math.isnan(x) else "inf")


@dataclass
class SuiteReport:
    """Outcome of one suite. ``wall_clock`` is kept out of the JSON form."""

    suite: str
    cases: list
    config: dict
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "cases": [c.to_dict() for c in sorted(self.cases, key=lambda c: c.key)]}

    @classmethod
    def from_dict(cls, d: dict, config: dict | None = None) -> "SuiteReport":
        if not isinstance(d, dict) or "suite" not in d or not isinstance(d.get("cases"), list):
            raise SchemaMismatch("suite entry needs suite and cases")
        return cls(d["suite"], [CaseResult.from_dict(c) for c in d["cases"]], config or {})


def check_document(reports, config: RunConfig) -> dict:
    """JSON document written by ``check``."""
    return {"schema_version": SCHEMA_VERSION, "kind": "check", "config": config.to_dict(),
            "passed": all(r.passed for r in reports), "suites": [r.to_dict() for r in reports]}


def parse_check_document(d) -> list:
    """Suite reports of a ``check`` document; raises SchemaMismatch."""
    if not isinstance(d, dict):
        raise SchemaMismatch("report must be a JSON object")
    if d.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(f"schema_version {d.get('schema_version')!r} is not {SCHEMA_VERSION}")
    if d.get("kind") != "check" or not isinstance(d.get("suites"), list):
        raise SchemaMismatch("expected a check report with a suites list")
    return [SuiteReport.from_dict(s, d.get("config")) for s in d["suites"]]


def run_suite(name: str, config: RunConfig, progress: Callable | None = None) -> SuiteReport:
    """Run every case of suite ``name``; exceptions are recorded as failed cases."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}")
    start = time.perf_counter()
    override = config.tolerances.get(name)
    results = []
    for case in sorted(BUILDERS[name](config), key=lambda c: c.key):
        tol = override if override is not None else case.tolerance
        try:
            res = CaseResult(case.key, case.tags, tol, report=case.run())
        except Exception as exc:  # recorded, not fatal
            res = CaseResult(case.key, case.tags, tol, error=f"{type(exc).__name__}: {exc}")
        results.append(res)
        if progress is not None:
            progress(res)
    return SuiteReport(name, results, config.to_dict(), time.perf_counter() - start)


def coverage(reports) -> dict:
    """``tag -> sorted keys of passing cases`` for every in-scope tag."""
    cov = {t: [] for t in IN_SCOPE_TAGS}
    for rep in reports:
        for c in rep.cases:
            if c.passed:
                for t in c.tags:
                    cov.setdefault(t, []).append(f"{rep.suite}/{c.key}")
    return {t: sorted(v) for t, v in sorted(cov.items())}


# --------------------------------------------------------------------------- #
#  helpers
# --------------------------------------------------------------------------- #
def _report(identity_id, tag, parameters, details, metric="rel", condition="", **kw) -> ResidualReport:
    return ResidualReport(identity_id=identity_id, tag=tag, parameters=parameters,
                          details={k: float(v) for k, v in details.items()}, metric=metric,
                          condition=condition, **kw)


def _pick(compute, keys, identity_id, tag, metric="rel"):
    """A case that reports the listed details of a shared composite report."""
    def run():
        rep = compute()
        return _report(identity_id, tag, rep.parameters, {k: rep.details[k] for k in keys}, metric,
                       rep.condition, quadrature_error=rep.quadrature_error)
    return run


def _rel(a, b):
    return np.abs(a - b) / np.abs(b)


def _from_smeared(identity_id, tag, res, parameters) -> ResidualReport:
    extra = {k: float(v) for k, v in res.details.items() if isinstance(v, (float, int)) and k != "b"}
    return ResidualReport(identity_id=identity_id, tag=tag, parameters=parameters, lhs=res.lhs, rhs=res.rhs,
                          quadrature_error=res.quadrature_error,
                          regulator_spread=res.details.get("ladder_spread", 0.0),
                          details=extra, metric="abs", condition="unit-norm Gaussian windows")


# --------------------------------------------------------------------------- #
#  dilog
# --------------------------------------------------------------------------- #
def _strip_points(params: ModularParams, seed: int, n: int = 50):
    rng = np.random.default_rng(seed)
    return rng.uniform(-3.0, 3.0, n) + 1j * rng.uniform(-0.45, 0.45, n) * params.Q


def _dilog_cases(cfg: RunConfig):
    cases = []
    for b in sorted(set(DILOG_BS) | {cfg.b}):
        p = ModularParams(b)
        z = _strip_points(p, cfg.seed)
        g = lambda x, p=p: gamma_array(x, p)
        w, wp = p.omega, p.omega_prime
        pre = f"b={b:g}/"
        par = {"b": b, "npoints": len(z), "seed": cfg.seed}

        def rec(z=z, g=g, w=w, wp=wp, par=par):
            r1 = 1 + np.exp(-1j * PI * z / w)
            r2 = 1 + np.exp(-1j * PI * z / wp)
            return _report("rec", "rec", par, {
                "shift_2omega'": np.max(_rel(g(z + wp) / g(z - wp), r1)),
                "shift_2omega": np.max(_rel(g(z + w) / g(z - w), r2))})

        def reflex(z=z, g=g, p=p, par=par):
            rhs = np.exp(1j * p.beta + 1j * PI * z * z)
            return _report("reflex", "reflex", par, {"gamma(z)gamma(-z)": np.max(_rel(g(z) * g(-z), rhs))})

        def conj(z=z, g=g, par=par):
            return _report("complex", "complex", par,
                           {"conj(gamma(z))gamma(conj z)": np.max(np.abs(np.conj(g(z)) * g(np.conj(z)) - 1))})

        def pole(p=p, par=par):
            d = {}
            for which in ("BasePole", "BaseZero"):
                d[which] = abs(fit_leading_coefficient(which, p) / pole_expansion(which, p).leading_coefficient - 1)
            return _report("pole", "pole", {"b": par["b"]}, d)

        def modular(z=z, g=g, p=p, par=par):
            return _report("modular", "rec", par, {"b->1/b": np.max(_rel(g(z), gamma_array(z, p.dual)))},
                           condition="gamma depends on b only through Q and the half-period pair")

        cases += [Case(pre + "rec", ("rec",), 1e-8, rec), Case(pre + "reflex", ("reflex",), 1e-8, reflex),
                  Case(pre + "complex", ("complex",), 1e-8, conj), Case(pre + "pole", ("pole",), 1e-8, pole),
                  Case(pre + "modular", ("rec",), 1e-8, modular)]
    return cases


# --------------------------------------------------------------------------- #
#  integral identities
# --------------------------------------------------------------------------- #
def identity_draws(family: str, n: int, seed: int, params: ModularParams) -> list:
    """``n`` in-domain parameter draws of an identity family, reproducible from ``seed``."""
    families = ["FT1", "FT2", "FT3", "F1F2", "invF", "invF_shift"]
    rng = np.random.default_rng([seed, SUITES.index("identities"), families.index(family)])
    hq = params.Q / 2
    U = rng.uniform
    out = []
    for _ in range(n):
        if family == "FT1":
            out.append({"z": complex(U(-1, 1), U(0.1, 0.9) * hq)})
        elif family == "FT2":
            out.append({"x": complex(U(-1, 1), U(-0.3, 0.3) * hq), "z": complex(U(-1, 1), U(0.1, 0.4) * hq)})
        elif family == "FT3":
            out.append({"x": complex(U(-1, 1), U(-0.2, 0.2) * hq), "y": complex(U(-1, 1), U(-0.2, 0.2) * hq),
                        "z": complex(U(-1, 1), U(0.1, 0.4) * hq)})
        elif family == "F1F2":
            s = complex(U(-1, 1), -U(0.1, 0.4) * hq)
            bi = U(0.0, 0.3) * hq
            ai = bi + s.imag - U(0.1, 0.3) * hq
            out.append({"a": complex(U(-1, 1), ai), "b_param": complex(U(-1, 1), bi), "s": s})
        elif family == "invF_shift":
            # t and t + 2 omega' both inside the domain: the margin left on each side is b/2
            m = params.b / 2
            out.append({"t": complex(U(-1, 1), -0.5 / params.b), "a": complex(U(-1, 1), -U(0.35, 0.65) * m),
                        "b_param": complex(U(-1, 1), U(0.35, 0.65) * m)})
        else:
            out.append({"t": complex(U(-1, 1), 0.0), "a": complex(U(-1, 1), -U(0.1, 0.5) * hq),
                        "b_param": complex(U(-1, 1), U(0.0, 0.3) * hq)})
    return out


def _identity_cases(cfg: RunConfig):
    p = cfg.params
    ladder = RegulatorLadder(cfg.ladder)
    fam = {"FT1": ("FT1eps",), "FT2": ("FT2eps",), "FT3": ("FT3eps",), "F1F2": ("F1", "F2"), "invF": ("invF",)}
    runner = {
        "FT1": lambda d: ident.eval_ft1(d["z"], p, ladder),
        "FT2": lambda d: ident.eval_ft2(d["x"], d["z"], p, ladder),
        "FT3": lambda d: ident.eval_ft3(d["x"], d["y"], d["z"], p, ladder),
        "F1F2": lambda d: ident.eval_f1f2(d["a"], d["b_param"], d["s"], p),
        "invF": lambda d: ident.eval_invf(d["t"], d["a"], d["b_param"], p),
    }

    @functools.lru_cache(maxsize=None)
    def family_reports(name):
        return tuple(runner[name](d) for d in identity_draws(name, cfg.draws, cfg.seed, p))

    def summary(name, what):
        def run():
            reps = family_reports(name)
            if what == "residual":
                d = {f"draw{i:02d}": r.rel_residual for i, r in enumerate(reps)}
            elif what == "spread":
                d = {f"draw{i:02d}": r.regulator_spread / abs(r.rhs) for i, r in enumerate(reps)}
            else:
                d = {f"draw{i:02d}": r.details["F1_F2_closed_form_gap"] for i, r in enumerate(reps)}
            return _report(name, fam[name][0], {"b": p.b, "draws": len(reps), "seed": cfg.seed}, d,
                           quadrature_error=max(r.quadrature_error for r in reps),
                           regulators=ladder.to_dict() if name.startswith("FT") else {},
                           condition="; ".join(sorted({r.condition for r in reps})))
        return run

    cases = []
    for name, tags in fam.items():
        cases.append(Case(f"{name}/residual", tags, 1e-5, summary(name, "residual")))
        if name.startswith("FT"):
            cases.append(Case(f"{name}/ladder_spread", tags, 1e-5, summary(name, "spread")))
    cases.append(Case("F1F2/closed_form_gap", ("F1", "F2"), 1e-9, summary("F1F2", "gap")))

    def invf_shift():
        d = {}
        for i, draw in enumerate(identity_draws("invF_shift", 5, cfg.seed, p)):
            d[f"draw{i:02d}"] = ident.eval_invf_shift(draw["t"], draw["a"], draw["b_param"], p).rel_residual
        return _report("InvF", "invF", {"b": p.b, "shift": "2omega'"}, d)

    def cond_gate():
        # in-domain draws must be accepted, points violating either condition rejected
        hq = p.Q / 2
        probes = [(d["a"], d["b_param"], d["s"], True) for d in identity_draws("F1F2", 5, cfg.seed, p)]
        probes += [(0.2 - 0.5j * hq, 0.1, 0.3 + 0.2j * hq, False), (0.1 + 0.6j * hq, 0.0, 0.2 - 0.2j * hq, False)]
        wrong = 0
        for a, bp, s, ok in probes:
            flag = ident.f1f2_domain_ok(a, bp, s)
            try:
                ident.eval_f1f2(a, bp, s, p)
                raised = False
            except DomainViolation:
                raised = True
            wrong += (flag != ok) + (raised == ok)
        return _report("cond", "cond", {"b": p.b, "probes": len(probes)}, {"misclassified": wrong / len(probes)},
                       metric="abs", condition="DomainViolation exactly outside Im s < 0, Im(a-b-s) < 0")

    cases.append(Case("invF/shift_consistency", ("invF",), 1e-5, invf_shift))
    cases.append(Case("cond/domain_gate", ("cond",), 1e-12, cond_gate))
    return cases


# --------------------------------------------------------------------------- #
#  algebra and intertwiner
# --------------------------------------------------------------------------- #
def _algebra_cases(cfg: RunConfig):
    p = cfg.params
    cases = [Case(f"relations/s={s:g}", ("EFK",), 1e-10, lambda s=s: check_relations(s, params=p))
             for s in (0.3, -0.45, 1.1)]
    cases.append(Case("coproduct", ("EFK",), 1e-10, lambda: check_coproduct(0.3, -0.45, params=p)))
    cases.append(Case("fourier_conjugation", ("Fourier",), 1e-10, lambda: _report(
        "fourier", "Fourier", {"b": p.b}, fourier_conjugation_residuals(params=p), metric="abs")))
    return cases


def _intertwiner_cases(cfg: RunConfig):
    p = cfg.params
    cases = []
    for s in (0.35, -0.6):
        spec = IntertwinerSpec(s, p)
        par = {"s": s, "b": p.b}
        cases += [
            Case(f"s={s:g}/SysA", ("SysA",), 1e-5, lambda spec=spec: verify_intertwining(spec)),
            Case(f"s={s:g}/unimodularity", ("AI",), 1e-9, lambda spec=spec, par=par: _report(
                "AI", "AI", par, {"||M(k)|-1|": unimodularity_residual(spec)}, metric="abs")),
            Case(f"s={s:g}/inverse", ("AI",), 1e-5, lambda spec=spec, par=par: _report(
                "AI", "AI", par, {"A(-s)A(s)-id": inverse_residual(spec)})),
            Case(f"s={s:g}/parseval", ("AI",), 1e-5, lambda spec=spec, par=par: _report(
                "AI", "AI", par, {"norm ratio": parseval_residual(spec)})),
        ]
    return cases


# --------------------------------------------------------------------------- #
#  3j kernel
# --------------------------------------------------------------------------- #
def _threej_cases(cfg: RunConfig):
    p = cfg.params
    pts = threej.default_points(10, cfg.seed)
    cases = []
    for spins in TRIPLES:
        spec = threej.KernelSpec(spins, p)
        pre = "spins=" + ",".join(f"{s:g}" for s in spins) + "/"
        par = {"spins": list(spins), "b": p.b}

        def halving(spec=spec, par=par):
            x = pts[:3]
            half = threej.KernelSpec(spec.spins, p, eps=spec.regulator / 2)
            a = threej.kernel_S(spec, *x.T.astype(complex))
            return _report("sol", "sol", par, {"eps halving": np.max(_rel(threej.kernel_S(half, *x.T.astype(complex)), a))})

        cases += [
            Case(pre + "System", ("System", "S1", "S2", "S3", "sol"), 1e-7,
                 lambda spec=spec: threej.verify_system(spec, pts)),
            Case(pre + "Casimir", ("System1",), 1e-7, lambda spec=spec, par=par: _report(
                "Casimir", "System1", par, {"C12 S - (Z3+1/Z3) S": threej.casimir_eigen_residual(spec, pts)})),
            Case(pre + "S33", ("S33",), 1e-9, lambda spec=spec, par=par: _report(
                "S33", "S33", par, {"v1v2v3": threej.kernel_translation_residual(spec, pts),
                                    "v1v2v3~": threej.kernel_translation_residual(spec, pts, dual=True)})),
            Case(pre + "eps_halving", ("sol",), 1e-5, halving),
            Case(pre + "norm", ("norm",), 1e-9, lambda spins=spins, par=par: _report(
                "norm", "norm", par, {"|S0 e^{-2pi i s3 w''}|-1": threej.normalization_residual(spins, p)},
                metric="abs")),
        ]
        for pm in (0.2, -0.4):
            fact = functools.lru_cache(maxsize=None)(
                lambda spins=spins, pm=pm: threej.verify_momentum_consistency(spins, pm, params=p))
            cases.append(Case(pre + f"p={pm:g}/Sp_factorized", ("Sp", "norm"), 1e-9,
                              _pick(fact, ["factorized"], "Sp", "Sp")))
            if spins == TRIPLES[0]:
                cases.append(Case(pre + f"p={pm:g}/Sp_fourier", ("Sp",), 1e-5, _pick(fact, ["fourier"], "Sp", "Sp")))
    spec0 = threej.KernelSpec(TRIPLES[0], p)
    cases.append(Case("spins=0.3,0.5,0.7/Akern_oracle", ("Akern",), 1e-5,
                      lambda: threej.undressed_oracle_report(spec0)))
    cases.append(Case("spins=0.3,0.5,0.7/undressed_S33", ("S33", "Akern"), 1e-9, lambda: _report(
        "S33", "S33", {"spins": list(TRIPLES[0]), "b": p.b},
        {"v1v2v3 U": threej.undressed_translation_residual(spec0, pts)})))
    return cases


# --------------------------------------------------------------------------- #
#  Casimir undressing
# --------------------------------------------------------------------------- #
def _undressing_cases(cfg: RunConfig):
    p = cfg.params
    s1, s2, s3, pm = 0.3, 0.5, 0.7, 0.2
    chain = UndressingChain(s1, s2, p)
    par = {"s1": s1, "s2": s2, "b": p.b}
    f = TwoVarFunction.gaussian_pair().closed
    pts = np.array([[0.1, -0.2], [0.3 + 0.1j, 0.05], [-0.25, 0.4 - 0.05j]])
    steps = functools.lru_cache(maxsize=None)(lambda: verify_undressing_chain(chain))

    def forms():
        a = casimir_apply(s1, s2, f, pts, p)
        b = casimir_apply(s1, s2, f, pts, p, form="coproduct")
        return _report("casimir", "A", par, {"five_term vs coproduct": np.max(_rel(a, b))})

    def phip():
        psi = psi_callable(s1, s2, s3, pm, p)
        Z3 = np.exp(-1j * PI * s3 / p.omega)
        lhs, sc = evaluate(tilde_casimir(s1, s2, p), psi, pts, with_scale=True)
        ref = psi(pts[:, 0], pts[:, 1])
        ct = np.max(np.abs(lhs - (Z3 + 1 / Z3) * ref) / sc)
        return _report("Phip", "Phip", {**par, "s3": s3, "p": pm}, {"Ct Psi - (Z3+1/Z3) Psi": ct})

    def k_psi():
        psi = psi_callable(s1, s2, s3, pm, p)
        lhs = evaluate(v_op(p, 0) * v_op(p, 1), psi, pts)
        ref = np.exp(1j * PI * pm / p.omega) * psi(pts[:, 0], pts[:, 1])
        return _report("Phip", "Phip", {**par, "s3": s3, "p": pm}, {"K12 Psi - e^{i pi p/w} Psi": np.max(_rel(lhs, ref))})

    return [
        Case("step1", ("A",), 1e-8, _pick(steps, ["step1"], "undressing", "A")),
        Case("step2_fourier", ("A",), 1e-4, _pick(steps, ["step2"], "undressing", "A")),
        Case("step3", ("A",), 1e-8, _pick(steps, ["step3"], "undressing", "A")),
        Case("K_invariance", ("A",), 1e-9, _pick(steps, ["K_step1", "K_step2", "K_step3"], "undressing", "A")),
        Case("casimir_forms", ("A",), 1e-9, forms),
        Case("unimodularity", ("A",), 1e-9, lambda: _report(
            "A", "A", par, {"||R|-1|": multiplier_unimodularity(chain)}, metric="abs")),
        Case("substitution", ("A",), 1e-9, lambda: _report(
            "A", "A", par, {"V1V2 - v1v2": substitution_residual(s1, s2, f, pts, p)})),
        Case("composite", ("Akern",), 1e-8, lambda: verify_composite(chain)),
        Case("A_Ainv", ("A", "Akern"), 1e-6, lambda: _report(
            "Akern", "Akern", par, {"A A^-1 f - f": inverse_consistency(chain)})),
        Case("Psi_p_casimir", ("Phip",), 1e-8, phip),
        Case("Psi_p_K", ("Phip",), 1e-9, k_psi),
    ]


# --------------------------------------------------------------------------- #
#  spectral
# --------------------------------------------------------------------------- #
def _spectral_cases(cfg: RunConfig):
    p = cfg.params
    ladder = RegulatorLadder(cfg.ladder)
    x = np.random.default_rng([cfg.seed, SUITES.index("spectral")]).uniform(-2.0, 2.0, 20)
    grid = np.linspace(0.05, 3.0, 60)
    cases = []
    for s in (0.2, 0.7, 1.3):
        cases.append(Case(f"phi_eigen/s={s:g}", ("phi",), 1e-8, lambda s=s: _report(
            "phi", "phi", {"s": s, "b": p.b, "npoints": len(x)},
            {"(v+u+u^-1-Z-1/Z) phi": max(ks.length_operator_residual(x, s, p),
                                         ks.length_operator_residual(x + 0.2j, s, p))})))
    cases.append(Case("rho_closed_forms", ("exp",), 1e-10, lambda: _report(
        "rho", "exp", {"b": p.b}, {"rho forms": ks.measure(grid, p).closed_form_residual()}, metric="abs")))
    cases.append(Case("S_unitarity", ("ort",), 1e-9, lambda: _report(
        "S", "ort", {"b": p.b}, {"||S|-1|": ks.measure(grid, p).unitarity_residual()}, metric="abs")))
    cases.append(Case("reflection", ("ort",), 1e-9, lambda: _report(
        "S", "ort", {"b": p.b}, {"F(s)-S(s)F(-s)": ks.reflection_residual(params=p)}, metric="abs")))
    cases.append(Case("projection", ("ort",), 1e-9, lambda: _report(
        "P", "ort", {"b": p.b}, ks.projection_checks(params=p), metric="abs")))
    cases.append(Case("gamma_ratio", ("ort",), 1e-9, lambda: _report(
        "gamma_ratio", "ort", {"b": p.b}, {"z=0": ks.appendix_gamma_ratio_identity(0.0, p),
                                   "z=0.3": ks.appendix_gamma_ratio_identity(0.3, p)}, metric="abs")))
    for lam, mu in ((0.4, 0.4), (0.4, -0.4), (0.4, 0.8)):
        cases.append(Case(f"ort/{lam:g},{mu:g}", ("ort",), 1e-3, lambda lam=lam, mu=mu: _from_smeared(
            "ort", "ort", ks.orthogonality_check(lam, mu, params=p), {"lambda": lam, "mu": mu, "b": p.b})))
    for x0, y0 in ((0.1, 0.1), (0.1, 0.25)):
        cases.append(Case(f"compl/{x0:g},{y0:g}", ("compl",), 1e-3, lambda x0=x0, y0=y0: _from_smeared(
            "compl", "compl", ks.completeness_check(x0, y0, params=p, ladder=ladder), {"x0": x0, "y0": y0, "b": p.b})))
    pm = 0.2
    for lam, mu in ((0.4, 0.4), (0.4, -0.4)):
        cases.append(Case(f"Sp_ort/{lam:g},{mu:g}", ("Sp", "ort"), 1e-3, lambda lam=lam, mu=mu: _from_smeared(
            "Sp_ort", "Sp", threej.sp_orthogonality_check(pm, lam, mu, params=p),
            {"p": pm, "lambda": lam, "mu": mu, "b": p.b})))
    for x0, y0 in ((0.1, 0.1), (0.1, 0.6)):
        cases.append(Case(f"Sp_compl/{x0:g},{y0:g}", ("Sp", "compl", "exp"), 1e-3, lambda x0=x0, y0=y0: _from_smeared(
            "Sp_compl", "Sp", threej.sp_completeness_check(TRIPLES[0], pm, x0, y0, params=p, ladder=ladder),
            {"p": pm, "x0": x0, "y0": y0, "spins": list(TRIPLES[0]), "b": p.b})))
    return cases


BUILDERS = {
    "dilog": _dilog_cases,
    "identities": _identity_cases,
    "algebra": _algebra_cases,
    "intertwiner": _intertwiner_cases,
    "threej": _threej_cases,
    "undressing": _undressing_cases,
    "spectral": _spectral_cases,
}
