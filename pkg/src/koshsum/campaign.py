"""Verification campaigns: a formula registry, TOML configs and a parallel runner."""

from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import identities as ids
from . import sumform as sf
from .errors import HypothesisViolation, KoshError
from .report import VerificationReport, write_csv, write_jsonl
from .testfns import parse_preset

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PI = math.pi
FOUR_PI_SQ = 4.0 * PI ** 2
PI_SQ = PI ** 2

STANDARD_P_GRID = (0.1, 1.0, 10.0)
STANDARD_FUNCTIONS = ("exp:a=1", "rational:b=2,c=1", "expcos:a=1,b=0.5")


@dataclass(frozen=True)
class FormulaInfo:
    """How a formula consumes the campaign grid.

    ``uses`` lists the grid axes: "function", "p" and the names of extra
    parameters; ``run`` maps (function, p, params) to a report.
    """

    uses: tuple
    run: Callable
    dual_product: float | None = None


def _fn_only(ev):
    return lambda f, p, q, tol: ev(f, atol=tol[0], rtol=tol[1])


def _fn_p(ev):
    return lambda f, p, q, tol: ev(f, p, atol=tol[0], rtol=tol[1])


FORMULAS: dict[str, FormulaInfo] = {
    "abel_plana": FormulaInfo(("function",), _fn_only(sf.eval_abel_plana)),
    "half_integer": FormulaInfo(("function",), _fn_only(sf.eval_half_integer)),
    "entry4": FormulaInfo(("function",), _fn_only(sf.eval_entry4)),
    "entry5": FormulaInfo(("function",), _fn_only(sf.eval_entry5)),
    "entry6": FormulaInfo(("function",), _fn_only(sf.eval_entry6)),
    "rotation_lemma": FormulaInfo(("function",), _fn_only(sf.eval_rotation_lemma)),
    "ramanujan_alpha": FormulaInfo(
        ("function", "alpha"),
        lambda f, p, q, tol: sf.eval_ramanujan_alpha(f, q["alpha"], atol=tol[0], rtol=tol[1])),
    "theorem1": FormulaInfo(("function", "p"), _fn_p(sf.eval_theorem1)),
    "theorem3": FormulaInfo(("function", "p"), _fn_p(sf.eval_theorem3)),
    "theorem4": FormulaInfo(("function", "p"), _fn_p(sf.eval_theorem4)),
    "koshagain": FormulaInfo(("function", "p"), _fn_p(sf.eval_koshagain)),
    "koshalt": FormulaInfo(
        ("p",), lambda f, p, q, tol: sf.eval_koshalt(p, atol=max(tol[0], 1e-5), rtol=max(tol[1], 1e-5))),
    "theorem5": FormulaInfo(
        ("p", "w", "z"), lambda f, p, q, tol: ids.eval_theorem5(p, q["w"], q["z"], atol=tol[0], rtol=tol[1])),
    "half_lambert": FormulaInfo(
        ("w", "z"), lambda f, p, q, tol: ids.eval_corollary_half_lambert(q["w"], q["z"], atol=tol[0], rtol=tol[1])),
    "entry_ab": FormulaInfo(
        ("n", "alpha", "beta"),
        lambda f, p, q, tol: ids.eval_entry_ab(q["n"], q["alpha"], q["beta"], atol=tol[0], rtol=tol[1]),
        FOUR_PI_SQ),
    "thm_eisenstein_p": FormulaInfo(
        ("p", "n", "alpha", "beta"),
        lambda f, p, q, tol: ids.eval_thm_eisenstein_p(p, q["n"], q["alpha"], q["beta"], atol=tol[0], rtol=tol[1]),
        FOUR_PI_SQ),
    "half_eisenstein": FormulaInfo(
        ("n", "alpha", "beta"),
        lambda f, p, q, tol: ids.eval_corollary_half_eisenstein(q["n"], q["alpha"], q["beta"], atol=tol[0],
                                                                rtol=tol[1]),
        FOUR_PI_SQ),
    "zeta_odd": FormulaInfo(
        ("p", "m", "alpha", "beta"),
        lambda f, p, q, tol: ids.eval_corollary_zeta_odd(p, q["m"], q["alpha"], q["beta"], atol=tol[0],
                                                         rtol=tol[1]),
        PI_SQ),
}

# parameter grids used when a config does not give its own
DEFAULT_GRIDS: dict[str, dict] = {
    "ramanujan_alpha": {"alpha": [0.3, 0.5]},
    "theorem5": {"w": [2.0, 2.5], "z": [1.0, 0.8]},
    "half_lambert": {"w": [2.0, 3.0], "z": [1.0, 2.0]},
    "entry_ab": {"n": [3.0, 3.5, 4.0], "alpha": [PI, 2 * PI], "beta": [4 * PI, 2 * PI]},
    "thm_eisenstein_p": {"n": [3.0, 4.0], "alpha": [PI, 2 * PI], "beta": [4 * PI, 2 * PI]},
    "half_eisenstein": {"n": [2.5, 3.0, 4.0], "alpha": [PI, 2 * PI], "beta": [4 * PI, 2 * PI]},
    "zeta_odd": {"m": [1, 2], "alpha": [PI / 2, PI], "beta": [2 * PI, PI]},
}

# parameters that are zipped together rather than crossed
PAIRED = (("w", "z"), ("alpha", "beta"))


class ConfigError(ValueError):
    """A campaign config that cannot be run."""


@dataclass
class CampaignConfig:
    """A verification campaign.

    Attributes
    ----------
    formulas : list of str
        Formula ids, see ``FORMULAS``.
    p_grid : list of float
    functions : list of str
        Preset specs such as "exp:a=1".
    grids : dict
        Per-formula parameter grids; lists under ``PAIRED`` names are zipped.
    atol, rtol : float
    jsonl, csv : str or None
        Output paths.
    """

    formulas: list = field(default_factory=lambda: sorted(FORMULAS))
    p_grid: list = field(default_factory=lambda: list(STANDARD_P_GRID))
    functions: list = field(default_factory=lambda: list(STANDARD_FUNCTIONS))
    grids: dict = field(default_factory=dict)
    atol: float = 1e-6
    rtol: float = 1e-6
    jsonl: str | None = None
    csv: str | None = None

    def __post_init__(self):
        if not self.formulas:
            raise ConfigError("formulas must not be empty")
        unknown = [f for f in self.formulas if f not in FORMULAS]
        if unknown:
            raise ConfigError(f"unknown formula(s): {', '.join(unknown)}")
        if not self.p_grid or any(not (isinstance(p, (int, float)) and math.isfinite(p) and p > 0)
                                  for p in self.p_grid):
            raise ConfigError("p_grid must be a non-empty list of positive reals")
        if not self.functions:
            raise ConfigError("functions must not be empty")
        for spec in self.functions:
            try:
                parse_preset(spec)
            except KoshError as exc:
                raise ConfigError(str(exc)) from None
        if not (self.atol > 0 and self.rtol > 0):
            raise ConfigError("tolerances must be positive")
        merged = {}
        for fid in self.formulas:
            g = dict(DEFAULT_GRIDS.get(fid, {}))
            g.update(self.grids.get(fid, {}))
            merged[fid] = _validate_grid(fid, g)
        self.grids = merged


def _as_number(v):
    if isinstance(v, str):
        try:
            c = complex(v.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"not a number: {v!r}") from None
        return c.real if c.imag == 0 else c
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"not a number: {v!r}")
    return v


def _validate_grid(fid: str, grid: dict) -> dict:
    info = FORMULAS[fid]
    needed = [u for u in info.uses if u not in ("function", "p")]
    out = {}
    for name in needed:
        vals = grid.get(name)
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"{fid}: grid '{name}' must be a non-empty list")
        out[name] = [_as_number(v) for v in vals]
    for a, b in PAIRED:
        if a in out and b in out and len(out[a]) != len(out[b]):
            raise ConfigError(f"{fid}: '{a}' and '{b}' must have the same length")
    if info.dual_product is not None:
        pairs = []
        for al, be in zip(out["alpha"], out["beta"]):
            try:
                pairs.append(ids.normalize_dual(float(al), float(be), info.dual_product))
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{fid}: {exc}") from None
        out["alpha"] = [a for a, _ in pairs]
        out["beta"] = [b for _, b in pairs]
    if "m" in out and any(not (float(m).is_integer() and m >= 1) for m in out["m"]):
        raise ConfigError(f"{fid}: m must be positive integers")
    if "m" in out:
        out["m"] = [int(m) for m in out["m"]]
    return out


def load_config(path: str) -> CampaignConfig:
    """Read a TOML campaign file.

    Keys: formulas, p_grid, functions, [tolerances] atol/rtol,
    [output] jsonl/csv, and [grids.<formula_id>] with list-valued parameters.
    """
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(data)


def config_from_dict(data: dict) -> CampaignConfig:
    known = {"formulas", "p_grid", "functions", "tolerances", "output", "grids"}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(extra))}")
    kw = {}
    for key in ("formulas", "p_grid", "functions"):
        if key in data:
            if not isinstance(data[key], list):
                raise ConfigError(f"'{key}' must be a list")
            kw[key] = [_as_number(v) if key == "p_grid" else v for v in data[key]]
    tol = data.get("tolerances", {})
    kw["atol"] = float(tol.get("atol", 1e-6))
    kw["rtol"] = float(tol.get("rtol", 1e-6))
    out = data.get("output", {})
    kw["jsonl"] = out.get("jsonl")
    kw["csv"] = out.get("csv")
    kw["grids"] = data.get("grids", {})
    return CampaignConfig(**kw)


@dataclass(frozen=True)
class Job:
    formula_id: str
    function: str | None
    p: float | None
    params: tuple


def _param_points(fid: str, grid: dict):
    """Expand a formula grid: PAIRED lists are zipped, the rest crossed."""
    axes = []
    done = set()
    for a, b in PAIRED:
        if a in grid and b in grid:
            axes.append([((a, x), (b, y)) for x, y in zip(grid[a], grid[b])])
            done |= {a, b}
    for name, vals in grid.items():
        if name not in done:
            axes.append([((name, v),) for v in vals])
    points = [()]
    for axis in axes:
        points = [pt + item for pt in points for item in axis]
    return points


def plan(config: CampaignConfig) -> list[Job]:
    """All jobs of a campaign, ordered by formula id and then grid order."""
    jobs = []
    for fid in sorted(config.formulas):
        info = FORMULAS[fid]
        fns = config.functions if "function" in info.uses else [None]
        ps = config.p_grid if "p" in info.uses else [None]
        for p in ps:
            for fn in fns:
                for pt in _param_points(fid, config.grids.get(fid, {})):
                    jobs.append(Job(fid, fn, p, pt))
    return jobs


def _failure_report(job: Job, exc: Exception, tol) -> VerificationReport:
    nan = float("nan")
    return VerificationReport(formula_id=job.formula_id, function_id=job.function or "-", lhs=nan, rhs=nan,
                              p=job.p, params=dict(job.params), atol=tol[0], rtol=tol[1],
                              diagnostics={"error": f"{type(exc).__name__}: {exc}"})


def run_job(job: Job, atol: float = 1e-6, rtol: float = 1e-6):
    """Run one job; returns a report, or None if the function is outside the formula's hypotheses."""
    info = FORMULAS[job.formula_id]
    f = parse_preset(job.function) if job.function else None
    tol = (atol, rtol)
    try:
        return info.run(f, job.p, dict(job.params), tol)
    except HypothesisViolation:
        return None
    except (KoshError, ArithmeticError, ValueError) as exc:
        return _failure_report(job, exc, tol)


def thread_count() -> int:
    raw = os.environ.get("KOSH_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


@dataclass
class CampaignResult:
    reports: list
    skipped: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def run_campaign(config: CampaignConfig, threads: int | None = None) -> CampaignResult:
    """Run every job; report order is the plan order regardless of scheduling."""
    jobs = plan(config)
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1:
        results = [run_job(j, config.atol, config.rtol) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda j: run_job(j, config.atol, config.rtol), jobs))
    reports = [r for r in results if r is not None]
    skipped = [j for j, r in zip(jobs, results) if r is None]
    return CampaignResult(reports, skipped)


def write_outputs(result: CampaignResult, jsonl: str | None, csv_path: str | None,
                  include_timing: bool = False) -> None:
    if jsonl:
        with open(jsonl, "w", encoding="utf-8", newline="\n") as fh:
            write_jsonl(result.reports, fh, include_timing)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            write_csv(result.reports, fh)


def pass_matrix(reports) -> str:
    """Text table: one row per formula, one column per p (or '-'), cells passed/total."""
    cols = sorted({r.p for r in reports if r.p is not None})
    has_none = any(r.p is None for r in reports)
    headers = (["-"] if has_none else []) + [f"p={p:g}" for p in cols]
    keys = ([None] if has_none else []) + cols
    rows = {}
    for r in reports:
        cell = rows.setdefault(r.formula_id, {}).setdefault(r.p, [0, 0])
        cell[0] += r.passed
        cell[1] += 1
    width = max([len("formula")] + [len(f) for f in rows])
    lines = ["formula".ljust(width) + "".join(h.rjust(10) for h in headers)]
    for fid in sorted(rows):
        cells = []
        for k in keys:
            c = rows[fid].get(k)
            cells.append(("" if c is None else f"{c[0]}/{c[1]}").rjust(10))
        lines.append(fid.ljust(width) + "".join(cells))
    return "\n".join(lines)


__all__ = [
    "FORMULAS", "DEFAULT_GRIDS", "CampaignConfig", "ConfigError", "Job", "CampaignResult", "load_config",
    "config_from_dict", "plan", "run_job", "run_campaign", "write_outputs", "pass_matrix", "thread_count",
]
