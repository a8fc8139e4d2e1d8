"""Residual reports and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaMismatch

SCHEMA_VERSION = 1


def encode_value(v):
    """JSON-safe encoding; complex numbers become ``{"re": .., "im": ..}``."""
    if v is None or isinstance(v, (str, bool)):
        return v
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": _num(v.real), "im": _num(v.imag)}
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _num(v)
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [encode_value(x) for x in v]
    return str(v)


def _num(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def decode_value(v):
    if isinstance(v, dict):
        if set(v) == {"re", "im"}:
            return complex(_denum(v["re"]), _denum(v["im"]))
        return {k: decode_value(x) for k, x in v.items()}
    if isinstance(v, list):
        return [decode_value(x) for x in v]
    if v in ("nan", "inf", "-inf"):
        return float(v)
    return v


def _denum(x):
    return float(x)


@dataclass
class ResidualReport:
    """
    Outcome of one verification case.

    Attributes
    ----------
    identity_id : str
        Case family, e.g. ``"FT1"`` or ``"relations"``.
    tag : str
        Equation tag the case certifies, e.g. ``"FT1eps"``.
    parameters : dict
        Named inputs of the case.
    lhs, rhs : complex or None
        The two sides when the case compares two numbers.
    abs_residual, rel_residual : float
        ``|lhs - rhs|`` and its ratio to ``|rhs|``; for aggregate cases the
        largest sub-residual.
    quadrature_error : float
        Largest quadrature error estimate that entered the case.
    regulator_spread : float
        Extrapolation spread of the regulator ladder (0 when unregulated).
    details : dict
        Named sub-residuals of aggregate cases.
    condition : str
        Convergence or domain assumption under which the case was run.
    metric : str
        ``"abs"`` or ``"rel"``: which residual is compared with the tolerance.
    """

    identity_id: str
    tag: str
    parameters: dict = field(default_factory=dict)
    lhs: complex | None = None
    rhs: complex | None = None
    abs_residual: float = 0.0
    rel_residual: float = 0.0
    quadrature_error: float = 0.0
    regulator_spread: float = 0.0
    details: dict = field(default_factory=dict)
    condition: str = ""
    metric: str = "rel"
    regulators: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lhs is not None and self.rhs is not None:
            self.lhs = complex(self.lhs)
            self.rhs = complex(self.rhs)
            self.abs_residual = abs(self.lhs - self.rhs)
            self.rel_residual = self.abs_residual / abs(self.rhs) if self.rhs != 0 else self.abs_residual
        elif self.details:
            worst = max(float(v) for v in self.details.values())
            self.abs_residual = max(self.abs_residual, worst)
            self.rel_residual = max(self.rel_residual, worst)
        self.abs_residual = float(self.abs_residual)
        self.rel_residual = float(self.rel_residual)
        self.quadrature_error = float(abs(self.quadrature_error))
        self.regulator_spread = float(abs(self.regulator_spread))

    @property
    def residual(self) -> float:
        return self.rel_residual if self.metric == "rel" else self.abs_residual

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "tag": self.tag,
            "parameters": encode_value(self.parameters),
            "lhs": encode_value(self.lhs),
            "rhs": encode_value(self.rhs),
            "abs_residual": _num(self.abs_residual),
            "rel_residual": _num(self.rel_residual),
            "quadrature_error": _num(self.quadrature_error),
            "regulator_spread": _num(self.regulator_spread),
            "details": encode_value(self.details),
            "condition": self.condition,
            "metric": self.metric,
            "regulators": encode_value(self.regulators),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualReport":
        required = {"identity_id", "tag", "abs_residual", "rel_residual"}
        if not isinstance(d, dict) or not required <= set(d):
            raise SchemaMismatch(f"residual report missing fields {required - set(d or {})}")
        rep = cls(
            identity_id=d["identity_id"],
            tag=d["tag"],
            parameters=decode_value(d.get("parameters", {})),
            quadrature_error=_denum(d.get("quadrature_error", 0.0)),
            regulator_spread=_denum(d.get("regulator_spread", 0.0)),
            condition=d.get("condition", ""),
            metric=d.get("metric", "rel"),
            regulators=decode_value(d.get("regulators", {})),
        )
        # restore stored values verbatim rather than recomputing them
        rep.lhs = decode_value(d.get("lhs"))
        rep.rhs = decode_value(d.get("rhs"))
        rep.details = decode_value(d.get("details", {}))
        rep.abs_residual = _denum(d["abs_residual"])
        rep.rel_residual = _denum(d["rel_residual"])
        return rep

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "ResidualReport":
        return cls.from_dict(json.loads(s))
