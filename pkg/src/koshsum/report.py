"""Verification reports and their JSONL / CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

CSV_COLUMNS = ("formula_id", "p", "function", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_residual", "pass")


def _num(v):
    """JSON-safe number: repr-exact floats, non-finite values as strings."""
    if v is None or isinstance(v, (bool, int, str)):
        return v
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def _flatten(key: str, v, out: dict) -> None:
    if isinstance(v, complex):
        out[f"{key}_re"] = _num(v.real)
        out[f"{key}_im"] = _num(v.imag)
    elif isinstance(v, (list, tuple)):
        out[key] = [_num(x) if not isinstance(x, complex) else [_num(x.real), _num(x.imag)] for x in v]
    elif isinstance(v, dict):
        sub: dict = {}
        for k in sorted(v):
            _flatten(k, v[k], sub)
        out[key] = sub
    else:
        out[key] = _num(v)


@dataclass
class VerificationReport:
    """Both sides of one identity, their residual and the error budget.

    Attributes
    ----------
    formula_id : str
    function_id : str
        Preset spec string, or "-" when the identity has no test function.
    lhs, rhs : complex
    p : float or None
        None for identities without the parameter p.
    params : dict
        Other identity parameters (n, alpha, beta, w, z, m, ...).
    sum_tail : float
        Truncation / acceleration error estimate of the series side(s).
    quad_errors : list of float
        Error estimates of every quadrature that entered the report.
    atol, rtol : float
        Pass iff abs_residual <= max(atol, rtol * max(|lhs|, |rhs|)).
    wall_time : float
        Seconds; excluded from JSONL unless requested.
    diagnostics : dict
        Formula-specific extras (term counts, residue checks, ...).
    """

    formula_id: str
    function_id: str
    lhs: complex
    rhs: complex
    p: float | None = None
    params: dict = field(default_factory=dict)
    sum_tail: float = 0.0
    quad_errors: list = field(default_factory=list)
    atol: float = 1e-6
    rtol: float = 1e-6
    wall_time: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = complex(self.lhs)
        self.rhs = complex(self.rhs)

    @property
    def abs_residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def scale(self) -> float:
        return max(abs(self.lhs), abs(self.rhs))

    @property
    def rel_residual(self) -> float:
        s = self.scale
        return self.abs_residual / s if s > 0 else 0.0

    @property
    def error_budget(self) -> float:
        return float(self.sum_tail + math.fsum(self.quad_errors))

    @property
    def passed(self) -> bool:
        r = self.abs_residual
        return bool(math.isfinite(r) and r <= max(self.atol, self.rtol * self.scale))

    def to_dict(self, include_timing: bool = False) -> dict:
        out: dict = {"formula_id": self.formula_id, "function": self.function_id, "p": _num(self.p)}
        _flatten("params", self.params, out)
        _flatten("lhs", self.lhs, out)
        _flatten("rhs", self.rhs, out)
        out["abs_residual"] = _num(self.abs_residual)
        out["rel_residual"] = _num(self.rel_residual)
        out["budgets"] = {"sum_tail": _num(self.sum_tail), "quad_errors": [_num(e) for e in self.quad_errors]}
        out["atol"] = _num(self.atol)
        out["rtol"] = _num(self.rtol)
        out["pass"] = self.passed
        _flatten("diagnostics", self.diagnostics, out)
        if include_timing:
            out["wall_time"] = _num(self.wall_time)
        return out

    def to_json_line(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), allow_nan=False, separators=(",", ":"))

    def csv_row(self) -> list:
        return [self.formula_id, "" if self.p is None else repr(float(self.p)), self.function_id,
                repr(self.lhs.real), repr(self.lhs.imag), repr(self.rhs.real), repr(self.rhs.imag),
                repr(self.abs_residual), "pass" if self.passed else "fail"]

    def summary(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        p = "" if self.p is None else f" p={self.p:g}"
        extra = "".join(f" {k}={_short(v)}" for k, v in self.params.items())
        return (f"{tag} {self.formula_id}{p} fn={self.function_id}{extra} "
                f"residual={self.abs_residual:.3e} budget={self.error_budget:.1e}")


def _short(v) -> str:
    if isinstance(v, complex):
        return f"{v.real:g}{v.imag:+g}j" if v.imag else f"{v.real:g}"
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def write_jsonl(reports, stream, include_timing: bool = False) -> None:
    for r in reports:
        stream.write(r.to_json_line(include_timing))
        stream.write("\n")


def write_csv(reports, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.csv_row())


def jsonl_text(reports, include_timing: bool = False) -> str:
    buf = io.StringIO()
    write_jsonl(reports, buf, include_timing)
    return buf.getvalue()
