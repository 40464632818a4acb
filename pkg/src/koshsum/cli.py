"""Command-line front end.

Exit codes: 0 success / all reports pass, 1 some report failed,
2 numerical breakdown, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import identities as ids
from .campaign import FORMULAS, CampaignResult, ConfigError, Job, load_config, pass_matrix, run_campaign, run_job, write_outputs
from .eigen import eigen_table
from .errors import BracketFailure, HypothesisViolation, KoshError, UnknownPreset
from .report import write_jsonl
from .testfns import parse_preset
from .zeta import eta_p_integral, eta_p_series, zeta_p_series, zeta_p_via_functional_eq

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NUMERIC = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text!r}")
    return v


def _number(text: str):
    try:
        c = complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return c.real if c.imag == 0 else c


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, allow_nan=False) + "\n")


def cmd_eigen(args) -> int:
    try:
        table = eigen_table(args.p, args.n_max)
    except BracketFailure as exc:
        print(f"eigen: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.json:
        sys.stdout.write(table.to_json() + "\n")
    else:
        print(f"p = {table.p!r}")
        for n, lam, res in table.roots:
            print(f"{n:6d}  {lam!r:>22}  {res: .3e}")
    return EXIT_OK


def cmd_zeta(args) -> int:
    method = args.method
    s = args.s
    if args.kind == "zeta_p":
        if method == "integral_rep":
            raise UsageError("zeta_p has no integral representation here; use series or functional_eq")
        if method == "functional_eq":
            if isinstance(s, complex) or not float(s).is_integer() or s > -3 or int(s) % 2 == 0:
                raise UsageError("functional_eq evaluates zeta_p at negative odd integers s <= -3")
            val = zeta_p_via_functional_eq(args.p, (-int(s) - 1) // 2)
        else:
            val = zeta_p_series(args.p, s)
    else:
        if method == "functional_eq":
            raise UsageError("functional_eq applies to zeta_p")
        val = eta_p_integral(args.p, s) if method == "integral_rep" else eta_p_series(args.p, s)
    if args.json:
        _emit(val.to_dict())
    else:
        v = complex(val.value)
        shown = repr(v.real) if v.imag == 0 else repr(v)
        print(f"{args.kind}({s}) at p={args.p:g} [{val.method}] = {shown}  (error ~ {val.error_estimate:.1e})")
    return EXIT_OK


def _verify_jobs(args) -> list[Job]:
    fid = args.formula
    info = FORMULAS[fid]
    if "function" in info.uses:
        if not args.fn:
            raise UsageError(f"{fid} needs --fn")
        for spec in args.fn:
            parse_preset(spec)
    if "p" in info.uses and not args.p:
        raise UsageError(f"{fid} needs --p")
    q = {}
    for name in info.uses:
        if name in ("function", "p"):
            continue
        if name == "beta":
            continue
        val = getattr(args, name)
        if val is None and not (name == "alpha" and args.beta is not None):
            raise UsageError(f"{fid} needs --{name}")
        q[name] = val
    if info.dual_product is not None:
        al, be = args.alpha, args.beta
        if al is None:
            al = info.dual_product / be
        if be is None:
            be = info.dual_product / al
        try:
            q["alpha"], q["beta"] = ids.normalize_dual(al, be, info.dual_product)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if "m" in q and (not isinstance(q["m"], float) or not q["m"].is_integer() or q["m"] < 1):
        raise UsageError("--m must be a positive integer")
    if "m" in q:
        q["m"] = int(q["m"])
    params = tuple((k, q[k]) for k in info.uses if k in q)
    fns = args.fn if "function" in info.uses else [None]
    ps = args.p if "p" in info.uses else [None]
    return [Job(fid, fn, p, params) for p in ps for fn in fns]


def cmd_verify(args) -> int:
    jobs = _verify_jobs(args)
    reports = []
    for job in jobs:
        try:
            r = FORMULAS[job.formula_id].run(parse_preset(job.function) if job.function else None, job.p,
                                             dict(job.params), (args.atol, args.rtol))
        except HypothesisViolation as exc:
            raise UsageError(str(exc)) from None
        except KoshError:
            r = run_job(job, args.atol, args.rtol)
        reports.append(r)
    with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
        write_jsonl(reports, fh, args.timings)
    for r in reports:
        print(r.summary())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_campaign(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    if args.atol is not None:
        cfg.atol = args.atol
    if args.rtol is not None:
        cfg.rtol = args.rtol
    result: CampaignResult = run_campaign(cfg, args.threads)
    write_outputs(result, args.jsonl or cfg.jsonl, args.csv or cfg.csv, args.timings)
    print(pass_matrix(result.reports))
    for job in result.skipped:
        print(f"skipped {job.formula_id} fn={job.function}: outside the hypothesis class", file=sys.stderr)
    for r in result.reports:
        if not r.passed:
            print(r.summary(), file=sys.stderr)
    n_pass = sum(r.passed for r in result.reports)
    print(f"{n_pass}/{len(result.reports)} reports passed")
    return EXIT_OK if result.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="koshsum", description="Eigenvalue-node summation formulas and their verification.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pe = sub.add_parser("eigen", help="roots lambda_n and their residuals")
    pe.add_argument("--p", type=_positive_float, required=True)
    pe.add_argument("--n-max", type=_positive_int, required=True)
    pe.add_argument("--json", action="store_true")
    pe.set_defaults(func=cmd_eigen)

    pz = sub.add_parser("zeta", help="zeta_p or eta_p at one argument")
    pz.add_argument("kind", choices=["zeta_p", "eta_p"])
    pz.add_argument("--s", type=_number, required=True)
    pz.add_argument("--p", type=_positive_float, required=True)
    pz.add_argument("--method", choices=["series", "integral_rep", "functional_eq"], default="series")
    pz.add_argument("--json", action="store_true")
    pz.set_defaults(func=cmd_zeta)

    pv = sub.add_parser("verify", help="evaluate both sides of one formula")
    pv.add_argument("formula", choices=sorted(FORMULAS))
    pv.add_argument("--p", type=_positive_float, action="append")
    pv.add_argument("--fn", action="append", help="preset spec, e.g. exp:a=1 (repeatable)")
    for name in ("n", "w", "z", "m", "alpha"):
        pv.add_argument(f"--{name}", type=_number)
    pv.add_argument("--beta", type=_positive_float)
    pv.add_argument("--atol", type=_positive_float, default=1e-6)
    pv.add_argument("--rtol", type=_positive_float, default=1e-6)
    pv.add_argument("--report", default="verify_report.jsonl", help="JSONL output path (default: %(default)s)")
    pv.add_argument("--timings", action="store_true", help="include wall times in JSONL")
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("campaign", help="run a TOML-configured verification campaign")
    pc.add_argument("config")
    pc.add_argument("--jsonl")
    pc.add_argument("--csv")
    pc.add_argument("--atol", type=_positive_float)
    pc.add_argument("--rtol", type=_positive_float)
    pc.add_argument("--threads", type=_positive_int, help="overrides KOSH_THREADS")
    pc.add_argument("--timings", action="store_true", help="include wall times in JSONL")
    pc.set_defaults(func=cmd_campaign)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, UnknownPreset) as exc:
        print(f"koshsum {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KoshError, ArithmeticError) as exc:
        print(f"koshsum {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"koshsum {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
