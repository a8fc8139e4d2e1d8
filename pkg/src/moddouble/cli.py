"""
Command line interface: ``moddouble eval | check | report``.

Exit status is 0 when everything passes, 1 when a residual exceeds its
tolerance and 2 for configuration, schema, domain or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from itertools import product

import numpy as np

from . import __version__
from .casimir_undressing import eigenfunction_Psi_p
from .errors import ConfigError, DomainViolation, ModDoubleError, NearSingularity, SchemaMismatch
from .kashaev_spectral import phi, rho, rho_sine
from .qdilog import ModularParams, gamma
from .reports import SCHEMA_VERSION, encode_value
from .suites import (IN_SCOPE_TAGS, SUITES, RunConfig, check_document, coverage, parse_check_document,
                     run_suite)
from .threej import KernelSpec, kernel_S, momentum_kernel_Sp

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

# input variables of each evaluable function, in column order
FUNCTIONS = {
    "gamma": ("x",),
    "phi": ("x", "s"),
    "rho": ("s",),
    "kernel_S": ("x1", "x2", "x3"),
    "Sp": ("x1", "x2"),
    "Psi_p": ("x1", "x2"),
}


# --------------------------------------------------------------------------- #
#  eval
# --------------------------------------------------------------------------- #
def parse_grid(spec: str):
    """``name=lo:hi:n`` (inclusive linspace) or ``name=value``; values may be complex."""
    if "=" not in spec:
        raise ConfigError(f"grid spec {spec!r} must look like name=lo:hi:n or name=value")
    name, rhs = spec.split("=", 1)
    name = name.strip()
    if not name:
        raise ConfigError(f"grid spec {spec!r} has no variable name")
    parts = rhs.split(":")
    try:
        if len(parts) == 1:
            return name, np.array([complex(parts[0])])
        if len(parts) == 3:
            n = int(parts[2])
            if n < 0:
                raise ValueError("negative point count")
            return name, np.linspace(complex(parts[0]), complex(parts[1]), n)
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}: {exc}") from exc
    raise ConfigError(f"bad grid spec {spec!r}")


def _real(v, name):
    if v.imag != 0:
        raise DomainViolation(f"{name} must be real, got {v}")
    return v.real


def _phi_rel_spread(x, s, params):
    val, spread = phi(x, s, params=params, with_spread=True)
    return spread / abs(val)


def evaluate_point(function: str, inputs: dict, params: ModularParams, spins=None, p_mom=None):
    """
    One table row: ``(value, error_estimate)``.

    Raises
    ------
    NearSingularity, DomainViolation
    """
    if function == "gamma":
        g = gamma(inputs["x"], params)
        return g.value, abs(g.value) * g.abs_log_error
    if function == "phi":
        val, spread = phi(inputs["x"], _real(inputs["s"], "s"), params=params, with_spread=True)
        return val, spread
    if function == "rho":
        s = _real(inputs["s"], "s")
        val = complex(rho(s, params))
        return val, abs(val - complex(rho_sine(s, params)))
    if spins is None:
        raise ConfigError(f"{function} needs --spins s1,s2,s3")
    if function == "kernel_S":
        return kernel_S(KernelSpec(spins, params), inputs["x1"], inputs["x2"], inputs["x3"], with_spread=True)
    if p_mom is None:
        raise ConfigError(f"{function} needs --p")
    x1, x2 = inputs["x1"], inputs["x2"]
    rel = _phi_rel_spread(x2 - x1 - spins[1], spins[2], params)
    if function == "Sp":
        val = momentum_kernel_Sp(spins, p_mom, x1, x2, params)
    else:
        val = eigenfunction_Psi_p(*spins, p_mom, x1, x2, params)
    return val, abs(val) * rel


def cmd_eval(function: str, grids: list, config: RunConfig, spins=None, p_mom=None) -> dict:
    """Evaluate ``function`` on the cartesian product of ``grids``; returns a table document."""
    if function not in FUNCTIONS:
        raise ConfigError(f"unknown function {function!r}; choose from {sorted(FUNCTIONS)}")
    names = FUNCTIONS[function]
    axes = dict(parse_grid(g) for g in grids)
    unknown = set(axes) - set(names)
    if unknown:
        raise ConfigError(f"{function} has inputs {list(names)}, not {sorted(unknown)}")
    missing = [n for n in names if n not in axes]
    if missing:
        raise ConfigError(f"{function} needs grids for {missing}")
    if p_mom is not None and not np.isreal(p_mom):
        raise DomainViolation("momentum p must be real")
    params = config.params
    rows = []
    for combo in product(*(axes[n] for n in names)):
        inputs = dict(zip(names, (complex(v) for v in combo)))
        row = {"inputs": inputs, "value": None, "error_estimate": None, "status": "ok"}
        try:
            val, err = evaluate_point(function, inputs, params, spins, None if p_mom is None else float(np.real(p_mom)))
            row["value"], row["error_estimate"] = complex(val), float(err)
        except NearSingularity as exc:
            row["status"] = f"near_singularity: {exc.factor or exc}"
        rows.append(row)
    return {"schema_version": SCHEMA_VERSION, "kind": "table", "function": function,
            "inputs": list(names), "spins": list(spins) if spins is not None else None,
            "p": None if p_mom is None else float(np.real(p_mom)),
            "config": config.to_dict(), "rows": rows}


def _fmt(x):
    return "" if x is None else repr(float(x))


def _complex_columns(name, v):
    return {f"{name}_re": _fmt(v.real), f"{name}_im": _fmt(v.imag)} if v.imag != 0 else {name: _fmt(v.real)}


def table_csv(doc: dict) -> str:
    """CSV form of a table: inputs, Re, Im, error_estimate, status, b, seed."""
    names = doc["inputs"]
    complex_axes = {n for n in names if any(r["inputs"][n].imag != 0 for r in doc["rows"])}
    header = []
    for n in names:
        header += [f"{n}_re", f"{n}_im"] if n in complex_axes else [n]
    header += ["Re", "Im", "error_estimate", "status", "b", "seed"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in doc["rows"]:
        line = []
        for n in names:
            v = r["inputs"][n]
            line += [_fmt(v.real), _fmt(v.imag)] if n in complex_axes else [_fmt(v.real)]
        val = r["value"]
        line += [_fmt(val.real) if val is not None else "nan", _fmt(val.imag) if val is not None else "nan",
                 _fmt(r["error_estimate"]) if val is not None else "nan", r["status"],
                 repr(doc["config"]["b"]), doc["config"]["seed"]]
        w.writerow(line)
    return buf.getvalue()


def table_json(doc: dict) -> str:
    out = dict(doc)
    out["rows"] = [{"inputs": encode_value(r["inputs"]),
                    "Re": None if r["value"] is None else float(r["value"].real),
                    "Im": None if r["value"] is None else float(r["value"].imag),
                    "error_estimate": r["error_estimate"], "status": r["status"]} for r in doc["rows"]]
    return _dumps(out)


# --------------------------------------------------------------------------- #
#  check
# --------------------------------------------------------------------------- #
def cmd_check(suite: str, config: RunConfig, progress=None) -> list:
    """Run one suite or all of them; returns the list of SuiteReports."""
    names = SUITES if suite == "all" else (suite,)
    for n in names:
        if n not in SUITES:
            raise ConfigError(f"unknown suite {n!r}")
    return [run_suite(n, config, progress) for n in names]


def check_csv(reports, config: RunConfig) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "key", "tags", "residual", "tolerance", "passed", "error", "b", "seed"])
    for rep in reports:
        for c in sorted(rep.cases, key=lambda c: c.key):
            w.writerow([rep.suite, c.key, ";".join(c.tags), repr(c.residual), repr(c.tolerance), c.passed,
                        c.error or "", repr(config.b), config.seed])
    return buf.getvalue()


# --------------------------------------------------------------------------- #
#  report
# --------------------------------------------------------------------------- #
def load_reports(paths) -> list:
    """SuiteReports of all ``check`` documents in ``paths``; raises SchemaMismatch."""
    out = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaMismatch(f"{path} is not JSON: {exc}") from exc
        out += parse_check_document(doc)
    return out


def cmd_report(paths) -> dict:
    """
    Merge ``check`` documents: the worst residual per equation tag and the
    coverage of the in-scope tags by passing cases.
    """
    reports = load_reports(paths)
    rows = {}
    for rep in reports:
        for c in rep.cases:
            key = f"{rep.suite}/{c.key}"
            for tag in c.tags:
                row = rows.setdefault(tag, {"tag": tag, "worst_residual": -1.0, "worst_case": None,
                                            "tolerance": None, "cases": 0, "passing": 0})
                row["cases"] += 1
                row["passing"] += int(c.passed)
                r = c.residual
                if r > row["worst_residual"] or (r == row["worst_residual"] and key < row["worst_case"]):
                    row["worst_residual"], row["worst_case"], row["tolerance"] = r, key, c.tolerance
    tag_rows = []
    for tag in sorted(rows):
        row = rows[tag]
        row["certified"] = row["passing"] > 0
        row["in_scope"] = tag in IN_SCOPE_TAGS
        row["worst_residual"] = _json_float(row["worst_residual"])
        tag_rows.append(row)
    cov = coverage(reports)
    return {
        "schema_version": SCHEMA_VERSION, "kind": "summary", "inputs": [str(p) for p in paths],
        "passed": all(r.passed for r in reports), "tags": tag_rows,
        "coverage": {"in_scope": list(IN_SCOPE_TAGS),
                     "certified": {t: cov[t] for t in IN_SCOPE_TAGS if cov[t]},
                     "missing": [t for t in IN_SCOPE_TAGS if not cov[t]]},
    }


def report_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tag", "worst_residual", "worst_case", "tolerance", "cases", "passing", "certified", "in_scope"])
    for r in doc["tags"]:
        w.writerow([r["tag"], r["worst_residual"], r["worst_case"], r["tolerance"], r["cases"], r["passing"],
                    r["certified"], r["in_scope"]])
    return buf.getvalue()


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else "inf"


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------- #
#  argument handling
# --------------------------------------------------------------------------- #
def _common(parser):
    parser.add_argument("--config", help="JSON run config; flags override its values")
    parser.add_argument("--b", type=float, help="modulus b > 0 (default 0.8)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (default json)")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--seed", type=int, help="seed of the sample grids (default 7)")
    parser.add_argument("--tol", action="append", default=[], metavar="SUITE=VALUE",
                        help="tolerance for every case of SUITE; may repeat")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moddouble", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"moddouble {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate a function on a grid")
    ev.add_argument("function", choices=sorted(FUNCTIONS))
    ev.add_argument("--grid", action="append", default=[], metavar="NAME=LO:HI:N",
                    help="grid of one input (NAME=LO:HI:N or NAME=VALUE); inputs: "
                         + "; ".join(f"{k}: {','.join(v)}" for k, v in FUNCTIONS.items()))
    ev.add_argument("--spins", help="s1,s2,s3 for kernel_S, Sp and Psi_p")
    ev.add_argument("--p", type=float, help="momentum for Sp and Psi_p")
    _common(ev)

    ch = sub.add_parser("check", help="run a verification suite")
    ch.add_argument("suite", choices=SUITES + ("all",))
    ch.add_argument("--quiet", action="store_true", help="no per-case progress on stderr")
    _common(ch)

    rp = sub.add_parser("report", help="merge check reports")
    rp.add_argument("paths", nargs="*", help="JSON files written by check")
    _common(rp)
    return parser


def config_from_args(args) -> RunConfig:
    base = RunConfig.load(args.config).to_dict() if args.config else RunConfig().to_dict()
    for key in ("b", "seed", "format", "out"):
        v = getattr(args, key)
        if v is not None:
            base[key] = v
    tols = dict(base.get("tolerances", {}))
    for item in args.tol:
        if "=" not in item:
            raise ConfigError(f"--tol expects SUITE=VALUE, got {item!r}")
        name, val = item.split("=", 1)
        try:
            tols[name.strip()] = float(val)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance {item!r}") from exc
    base["tolerances"] = tols
    return RunConfig.from_dict(base)


def _parse_spins(text):
    if text is None:
        return None
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad --spins {text!r}") from exc
    if len(vals) != 3:
        raise ConfigError("--spins needs three values")
    return vals


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if args.command == "eval":
            doc = cmd_eval(args.function, args.grid, config, _parse_spins(args.spins), args.p)
            _emit(table_csv(doc) if config.format == "csv" else table_json(doc), config.out)
            return EXIT_PASS
        if args.command == "check":
            progress = None
            if not args.quiet:
                progress = lambda c: print(f"{'PASS' if c.passed else 'FAIL'} {c.key}: residual {c.residual:.3g}"
                                           f" (tol {c.tolerance:g}){' ' + c.error if c.error else ''}",
                                           file=sys.stderr, flush=True)
            reports = cmd_check(args.suite, config, progress)
            for r in reports:
                print(f"suite {r.suite}: {'pass' if r.passed else 'FAIL'} "
                      f"({sum(c.passed for c in r.cases)}/{len(r.cases)} cases, {r.wall_clock:.1f} s)",
                      file=sys.stderr)
            text = check_csv(reports, config) if config.format == "csv" else _dumps(check_document(reports, config))
            _emit(text, config.out)
            return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL
        doc = cmd_report(args.paths)
        _emit(report_csv(doc) if config.format == "csv" else _dumps(doc), config.out)
        if args.paths and doc["coverage"]["missing"]:
            print("uncovered tags: " + ", ".join(doc["coverage"]["missing"]), file=sys.stderr)
        return EXIT_PASS if doc["passed"] else EXIT_FAIL
    except (ConfigError, SchemaMismatch, DomainViolation) as exc:
        print(f"moddouble: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ModDoubleError) as exc:
        print(f"moddouble: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
