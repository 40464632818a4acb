"""Acceptance criteria, one test per criterion.

Each criterion records a single PASS/FAIL line; ``conftest.py`` prints them
in the terminal summary.  Running this file directly prints the same lines.
"""

import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from koshsum import campaign as cp
from koshsum import identities as ids
from koshsum import sumform as sf
from koshsum.eigen import eigen_table, shared_table
from koshsum.kernels import kernel_K, kernel_K_partial_fraction
from koshsum.report import jsonl_text
from koshsum.testfns import parse_preset, preset
from koshsum.zeta import eta_p_integral, eta_p_series, riemann_zeta, zeta_p_series, zeta_p_via_functional_eq

PI = math.pi
STANDARD = list(cp.STANDARD_FUNCTIONS)
P_GRID = [0.01, 0.1, 1.0, 10.0, 100.0]

RESULTS: list[str] = []


@dataclass
class Criterion:
    number: int
    title: str
    budget_s: float
    failures: list = field(default_factory=list)
    worst: dict = field(default_factory=dict)

    def check(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def track(self, key: str, value: float) -> None:
        self.worst[key] = max(self.worst.get(key, 0.0), float(value))

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        elapsed = time.perf_counter() - self.t0
        if exc[0] is not None:
            self.failures.append(f"{exc[0].__name__}: {exc[1]}")
        self.check(elapsed < self.budget_s, f"runtime {elapsed:.1f}s over {self.budget_s:g}s")
        stats = ", ".join(f"{k}={v:.1e}" for k, v in self.worst.items())
        tag = "PASS" if not self.failures else "FAIL"
        line = f"[{tag}] criterion {self.number}: {self.title} ({elapsed:.2f}s; {stats})"
        if self.failures:
            line += " :: " + "; ".join(self.failures[:5])
        RESULTS.append(line)
        return True


def _finish(c: Criterion) -> None:
    assert not c.failures, RESULTS[-1]


# ---------------------------------------------------------------- 1

def test_criterion_1_eigenvalue_certification():
    c = Criterion(1, "eigenvalue certification", 1.0)
    with c:
        n = np.arange(1, 51)
        for p in (1e-6, 0.01, 0.1, 1.0, 10.0, 100.0, 1e6):
            lam = eigen_table(p, 50).lambdas
            c.check(bool(np.all((lam > n - 0.5) & (lam < n))), f"p={p:g}: root outside (n-1/2, n)")
            # (-1)^n g(lambda) with the exact offset lambda - n keeps pi*lambda's rounding out
            d = lam - n
            res = np.abs(p * np.sin(PI * d) + lam * np.cos(PI * d))
            c.track("residual/(1+p)", np.max(res) / (1 + p))
            c.check(bool(np.all(res <= 1e-12 * (1 + p))), f"p={p:g}: residual {np.max(res):.1e}")
            ulps = 4 * np.spacing(lam)
            if p >= 10:
                # lambda_n = n - arctan(lambda_n/p)/pi and arctan(x) <= x
                dev = np.abs(lam - n)
                c.check(bool(np.all(dev <= n / (PI * p) + ulps)), f"p={p:g}: large-p deviation")
            if p <= 0.1:
                # lambda_n = n - 1/2 + arctan(p/lambda_n)/pi
                dev = np.abs(lam - (n - 0.5))
                c.check(bool(np.all(dev <= p / (PI * (n - 0.5)) + ulps)), f"p={p:g}: small-p deviation")
    _finish(c)


# ---------------------------------------------------------------- 2

def test_criterion_2_partial_fraction_closure():
    c = Criterion(2, "partial-fraction closure of the kernel", 10.0)
    with c:
        grid = [complex(x, y) for x in np.linspace(0.1, 5.0, 8) for y in np.linspace(-2.0, 2.0, 9)]
        for p in (0.01, 0.1, 1.0, 10.0, 100.0):
            table = shared_table(p, 512)
            for z in grid:
                d = abs(kernel_K_partial_fraction(p, z, table) - kernel_K(p, z))
                c.track("max |K - K_pf|", d)
                c.check(d < 1e-7, f"p={p:g} z={z}: {d:.1e}")
    _finish(c)


# ---------------------------------------------------------------- 3

def test_criterion_3_zeta_cross_representation():
    c = Criterion(3, "eta_p series vs integral representation and limits", 60.0)
    with c:
        for s in (2, 3, 4):
            for p in (0.1, 1.0, 10.0):
                d = abs(eta_p_series(p, s).value - eta_p_integral(p, s).value)
                c.track("max route gap", d)
                c.check(d < 1e-6, f"s={s} p={p:g}: gap {d:.1e}")
        zeta2, zeta4 = PI ** 2 / 6, PI ** 4 / 90
        for s, target in ((2, zeta2), (4, zeta4)):
            for v in (eta_p_series(1e8, s).value, eta_p_integral(1e8, s).value, zeta_p_series(1e8, s).value):
                c.track("max limit error", abs(v - target))
                c.check(abs(v - target) < 1e-4, f"s={s}: integer limit {v}")
        for s in (2, 3, 4):
            target = (2.0 ** (1 - s) - 1) * riemann_zeta(s).real
            for v in (eta_p_series(1e-6, s).value, eta_p_integral(1e-6, s).value):
                c.track("max limit error", abs(v - target))
                c.check(abs(v - target) < 1e-4, f"s={s}: half-integer limit {v}")
    _finish(c)


# ---------------------------------------------------------------- 4

SUMMATION_FORMULAS = ["theorem1", "theorem3", "theorem4", "half_integer", "entry4", "entry5", "entry6",
                      "rotation_lemma", "koshagain", "koshalt", "ramanujan_alpha"]


def test_criterion_4_summation_closure():
    c = Criterion(4, "summation-formula closure over presets x p grid", 300.0)
    with c:
        cfg = cp.CampaignConfig(formulas=SUMMATION_FORMULAS, p_grid=P_GRID, functions=STANDARD)
        res = cp.run_campaign(cfg)
        c.check(not res.skipped, f"{len(res.skipped)} jobs skipped")
        seen = {r.formula_id for r in res.reports}
        c.check(seen == set(SUMMATION_FORMULAS), f"missing {set(SUMMATION_FORMULAS) - seen}")
        for r in res.reports:
            rel = 1e-5 if r.formula_id == "koshalt" else 1e-6
            ok = r.abs_residual <= max(rel, rel * r.scale)
            c.track("max residual/scale", r.abs_residual / max(1.0, r.scale))
            c.check(ok, f"{r.formula_id} fn={r.function_id} p={r.p}: {r.abs_residual:.1e}")
        e = math.e
        anchors = [
            (sf.eval_abel_plana(preset("exp", a=1)), e / (e - 1), "sum e^-n"),
            (sf.eval_abel_plana(preset("rational", b=1, c=0)), PI ** 2 / 6, "sum 1/(n+1)^2"),
            (sf.eval_entry6(preset("exp", a=1)), 1 / (2 * math.sinh(1.0)), "1/(2 sinh 1)"),
        ]
        for r, target, name in anchors:
            d = max(abs(r.lhs - target), abs(r.rhs - target))
            c.track("max anchor error", d)
            c.check(d < 1e-9, f"anchor {name}: {d:.1e}")
    _finish(c)


# ---------------------------------------------------------------- 5

def test_criterion_5_degeneration_web():
    c = Criterion(5, "degeneration web", 120.0)
    with c:
        def close(a, b, what):
            d = abs(a - b)
            c.track("max gap", d)
            c.check(d < 1e-4, f"{what}: {d:.1e}")

        for spec in STANDARD:
            f = parse_preset(spec)
            f0 = f.value_at_zero()
            ap = sf.eval_abel_plana(f)
            big = sf.eval_theorem4(f, 1e8)
            close(big.lhs, ap.lhs - f0, f"{spec} theorem4 integer limit lhs")
            close(big.rhs, ap.rhs - f0, f"{spec} theorem4 integer limit rhs")
            hi = sf.eval_half_integer(f)
            small = sf.eval_theorem4(f, 1e-6)
            close(small.lhs, hi.lhs, f"{spec} theorem4 half-integer limit lhs")
            close(small.rhs, hi.rhs, f"{spec} theorem4 half-integer limit rhs")
            # half-integer nodes turn the phases e^{i pi lambda_n} into i(-1)^{n+1}
            e4 = sf.eval_entry4(f)
            k0 = sf.eval_koshagain(f, 1e-6)
            close(k0.lhs, 1j * e4.lhs / 4, f"{spec} koshagain p->0 lhs")
            close(k0.rhs, 1j * e4.rhs / 4, f"{spec} koshagain p->0 rhs")
            e5 = sf.eval_entry5(f.scaled(2.0))
            kinf = sf.eval_koshagain(f, 1e8)
            close(kinf.lhs, e5.lhs - 0.5 * f0, f"{spec} koshagain p->inf lhs")
            close(kinf.rhs, e5.rhs - 0.5 * f0, f"{spec} koshagain p->inf rhs")
    _finish(c)


# ---------------------------------------------------------------- 6

def test_criterion_6_eisenstein_suite():
    c = Criterion(6, "Eisenstein-type suite", 600.0)
    with c:
        def closes(r, what, tol=1e-6):
            c.track("max residual", r.abs_residual)
            c.check(r.abs_residual < tol, f"{what}: {r.abs_residual:.1e}")

        r = ids.eval_entry_ab(3, PI, 4 * PI)
        c.check(r.diagnostics.get("pv_poles", 0) > 0, "entry_ab n=3 has no PV poles")
        closes(r, "entry_ab n=3")
        before = ids.pv_integral_count()
        r = ids.eval_entry_ab(4, PI, 4 * PI)
        c.check(ids.pv_integral_count() == before and r.diagnostics["pv_skipped"], "entry_ab n=4 computed a PV")
        closes(r, "entry_ab n=4")
        for p in (0.5, 1.0, 3.0):
            r = ids.eval_thm_eisenstein_p(p, 3, PI, 4 * PI)
            closes(r, f"thm_eisenstein_p p={p}")
            c.track("bracket imag defect", r.diagnostics["bracket_imag_defect"])
            c.check(r.diagnostics["bracket_imag_defect"] < 1e-10, f"p={p}: bracket not real")
        closes(ids.eval_corollary_half_eisenstein(3, 2 * PI, 2 * PI), "half_eisenstein n=3")
        closes(ids.eval_corollary_half_eisenstein(2.5, PI, 4 * PI), "half_eisenstein n=2.5")
        for p in (0.5, 1.0, 3.0):
            closes(ids.eval_corollary_zeta_odd(p, 1, PI / 2, 2 * PI), f"zeta_odd m=1 p={p}")
        r = ids.eval_corollary_zeta_odd(1.0, 2, PI, PI)
        for key in ("bracket_alpha", "bracket_beta"):
            c.track("m-even bracket", abs(r.diagnostics[key]))
            c.check(abs(r.diagnostics[key]) < 1e-7, f"m=2 {key} = {r.diagnostics[key]:.1e}")
        v = zeta_p_via_functional_eq(1e8, 1).value
        c.track("zeta_p(-3) - 1/120", abs(v - 1 / 120))
        c.check(abs(v - 1 / 120) < 1e-6, f"zeta_p(-3) at p=1e8: {v!r}")
    _finish(c)


# ---------------------------------------------------------------- 7

def test_criterion_7_determinism():
    c = Criterion(7, "deterministic campaign JSONL", 300.0)
    with c:
        texts = [jsonl_text(cp.run_campaign(cp.CampaignConfig(), threads=t).reports) for t in (1, 4, None)]
        c.check(len(set(texts)) == 1, "JSONL differs between runs")
        c.check(len(texts[0].splitlines()) > 50, "campaign produced too few reports")
        c.track("reports", len(texts[0].splitlines()))
    _finish(c)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    print("\n".join(RESULTS))
    sys.exit(1 if failed else 0)
