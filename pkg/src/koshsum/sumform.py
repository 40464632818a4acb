"""Two-sided evaluation of summation formulas over integer and eigenvalue nodes.

Every evaluator computes the series side and the integral side by separate
numerical routes and returns a :class:`VerificationReport`.  The odd and
even parts f(iy) -+ f(-iy) that appear in the boundary integrals are
assembled here; their removable zero at y = 0 is evaluated from derivative
metadata below ``SERIES_CUTOFF``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .eigen import EigenTable, as_params, lambda_continuous, shared_table, weight, weight_derivative
from .errors import HypothesisViolation, SlowConvergence
from .kernels import kernel_values, sigma_p
from .quad import IntegrandSpec, Singularity, integrate, integrate_semi_infinite
from .report import VerificationReport
from .series import TailEstimate, averaged_partial_sums, fsum_complex, integer_tail, node_tail
from .testfns import AnalyticFunction, preset, require_growth

PI = math.pi
TWO_PI = 2.0 * math.pi
SERIES_CUTOFF = 1e-6
DEFAULT_TOL = 1e-11
ALGEBRAIC_TERMS = 1024
AVERAGING_LEVELS = 16
MAX_TERMS = 1 << 20

# growth thresholds of the hypothesis classes
P_FORMULA_GROWTH = TWO_PI
ENTRY45_GROWTH = PI / 2
ENTRY6_GROWTH = PI


class Budget:
    """Accumulates quadrature error estimates and series tail estimates."""

    def __init__(self, tol: float):
        self.tol = tol
        self.quad_errors: list[float] = []
        self.sum_tail = 0.0

    def quad(self, spec: IntegrandSpec) -> complex:
        r = integrate_semi_infinite(spec, self.tol)
        self.quad_errors.append(float(r.error_estimate))
        return r.value

    def finite(self, f, a: float, b: float, breaks=()) -> complex:
        r = integrate(f, a, b, self.tol, breaks)
        self.quad_errors.append(float(r.error_estimate))
        return r.value

    def tail(self, err: float) -> None:
        self.sum_tail += float(err)


def odd_part(f: AnalyticFunction, y, d0: complex | None = None) -> np.ndarray:
    """f(iy) - f(-iy), with 2i*y*f'(0) below SERIES_CUTOFF when f'(0) is known."""
    y = np.asarray(y, dtype=float)
    z = 1j * y
    val = np.asarray(f.eval(z) - f.eval(-z), dtype=complex)
    if d0 is not None:
        val = np.where(y < SERIES_CUTOFF, 2j * y * d0, val)
    return val


def even_part(f: AnalyticFunction, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    z = 1j * y
    return np.asarray(f.eval(z) + f.eval(-z), dtype=complex)


def _p_breaks(p: float) -> list[float]:
    """Panel breaks at the scale p where sigma and K change character."""
    pts = [0.5, 2.0]
    if p < 2.0:
        pts += [0.1 * p, p, 10 * p]
    return sorted({x for x in pts if 1e-12 < x < 50})


def _x_spec(f: AnalyticFunction, g: Callable, lower: float = 0.0, breaks=()) -> IntegrandSpec:
    """Integrand over the positive reals that decays like f."""
    sing = Singularity.NONE
    expo = 0.0
    if lower == 0.0 and f.origin_exponent < 0:
        sing, expo = Singularity.ALGEBRAIC_AT_ZERO, f.origin_exponent
    if f.decay_rate > 0:
        return IntegrandSpec(g, decay_rate=f.decay_rate, endpoint_singularity=sing, singularity_exponent=expo,
                             panel_breaks=breaks, lower=lower)
    return IntegrandSpec(g, power_decay=f.power_decay or 2.0, endpoint_singularity=sing,
                         singularity_exponent=expo, panel_breaks=breaks, lower=lower)


def _boundary_spec(g: Callable, rate: float, breaks=(), singular: Singularity = Singularity.NONE) -> IntegrandSpec:
    if not rate > 0:
        raise HypothesisViolation("boundary integrand does not decay")
    return IntegrandSpec(g, decay_rate=rate, endpoint_singularity=singular, panel_breaks=breaks)


@dataclass
class Summand:
    """A series term t(x) evaluated at nodes x, with decay metadata.

    ``integral_from(X)`` returns int_X^inf t(x)/density(x) dx where the
    density is 1 for integer nodes and the node weight for eigenvalue nodes.
    """

    f: Callable
    df: Callable | None
    decay: float
    power: float | None
    integral_from: Callable[[float], complex] | None = None


def _exp_terms(nodes: Callable[[int], np.ndarray], t: Summand, step: float, tol: float):
    """Direct sum over nodes(N) until the geometric tail bound drops below tol."""
    ratio = math.exp(-t.decay * step)
    n = 32
    while True:
        x = nodes(n)
        vals = np.asarray(t.f(x), dtype=complex)
        bound = abs(vals[-1]) * ratio / (1.0 - ratio)
        if bound < tol * 1e-2 or n >= MAX_TERMS:
            if bound >= tol * 1e-2:
                raise SlowConvergence(f"series tail {bound:.3g} after {n} terms")
            return fsum_complex(vals), bound, n
        n *= 2


def integer_series(t: Summand, scale: float, shift: float, tol: float, alternating: bool = False):
    """sum_{n >= 0} s_n t(scale*n + shift) with s_n = 1 or (-1)^n.

    Returns (value, error_estimate, terms_used).
    """
    def nodes(n):
        return scale * np.arange(n, dtype=float) + shift

    sign = (lambda n: np.where(np.arange(n) % 2 == 0, 1.0, -1.0)) if alternating else (lambda n: 1.0)
    if t.decay > 0:
        ts = Summand(lambda x: t.f(x) * sign(x.size), None, t.decay, None)
        return _exp_terms(nodes, ts, scale, tol)
    n = ALGEBRAIC_TERMS
    x = nodes(n)
    vals = np.asarray(t.f(x), dtype=complex) * sign(n)
    if alternating:
        est = averaged_partial_sums(vals, AVERAGING_LEVELS)
        return est.value, est.error, n
    start = scale * (n - 0.5) + shift
    tail = integer_tail(n - 1, t.df, t.integral_from(start), scale, shift)
    return fsum_complex(vals) + tail.value, tail.error, n


def node_series(params, table: EigenTable | None, t: Summand, tol: float, alternating: bool = False):
    """sum_{n >= 1} t(lambda_n) over the eigenvalue nodes.

    For algebraic decay the tail beyond ALGEBRAIC_TERMS is an Euler-Maclaurin
    integral along the continuous root curve (``t.integral_from`` must then
    include the 1/weight density), or for oscillating terms the partial sums
    are averaged.
    """
    params = as_params(params)

    def nodes(n):
        tab = table if table is not None and table.count >= n else shared_table(params, n)
        return tab.lambdas[:n]

    if t.decay > 0:
        return _exp_terms(nodes, t, 0.5, tol)
    n = ALGEBRAIC_TERMS
    lam = nodes(n)
    vals = np.asarray(t.f(lam), dtype=complex)
    if alternating:
        est = averaged_partial_sums(vals, AVERAGING_LEVELS)
        return est.value, est.error, n
    edge = float(lambda_continuous(params, n + 0.5))
    tail = node_tail(params, n, t.df, t.integral_from(edge))
    return fsum_complex(vals) + tail.value, tail.error, n


def _fn_summand(f: AnalyticFunction, budget: Budget, density: Callable | None = None, scale_x: float = 1.0) -> Summand:
    """Summand x -> f(x) with tail integrals against 1/density."""
    def integral_from(X):
        g = f.eval if density is None else (lambda x: f.eval(x) / density(x))
        return budget.quad(_x_spec(f, g, lower=X))
    return Summand(f.eval, f.deriv, f.decay_rate, f.power_decay, integral_from)


def _report(formula_id, f_id, lhs, rhs, budget: Budget, t0: float, p=None, params=None, atol=1e-6, rtol=1e-6,
            diagnostics=None) -> VerificationReport:
    return VerificationReport(
        formula_id=formula_id, function_id=f_id, lhs=lhs, rhs=rhs, p=p, params=params or {},
        sum_tail=budget.sum_tail, quad_errors=list(budget.quad_errors), atol=atol, rtol=rtol,
        wall_time=time.perf_counter() - t0, diagnostics=diagnostics or {})


def _mu(p: float):
    """(p(p + 1/pi) + x^2)/(p^2 + x^2) = 1 + (p/pi)/(p^2 + x^2)."""
    return lambda x: 1.0 + (p / PI) / (p * p + np.asarray(x) ** 2)


# ----------------------------------------------------------------------------
# integer-node formulas


def eval_abel_plana(phi: AnalyticFunction, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                    rtol: float = 1e-6) -> VerificationReport:
    """sum_{n>=0} phi(n) against phi(0)/2 + int phi + i int (phi(iy) - phi(-iy))/(e^{2 pi y} - 1) dy."""
    require_growth(phi, P_FORMULA_GROWTH, "abel_plana")
    t0 = time.perf_counter()
    b = Budget(tol)
    lhs, err, n = integer_series(_fn_summand(phi, b), 1.0, 0.0, tol)
    b.tail(err)
    d0 = phi.derivative_at_zero()
    integral = b.quad(_x_spec(phi, phi.eval))

    def g(y):
        return 1j * odd_part(phi, y, d0) / np.expm1(TWO_PI * y)

    bnd = b.quad(_boundary_spec(g, TWO_PI - phi.growth_bound, breaks=(1.0,)))
    rhs = 0.5 * phi.value_at_zero() + integral + bnd
    return _report("abel_plana", phi.spec, lhs, rhs, b, t0, atol=atol, rtol=rtol, diagnostics={"terms": n})


def eval_half_integer(f: AnalyticFunction, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                      rtol: float = 1e-6) -> VerificationReport:
    """sum_{n>=1} f(n - 1/2) against int f - i int (f(ix) - f(-ix))/(e^{2 pi x} + 1) dx."""
    require_growth(f, P_FORMULA_GROWTH, "half_integer")
    t0 = time.perf_counter()
    b = Budget(tol)
    lhs, err, n = integer_series(_fn_summand(f, b), 1.0, 0.5, tol)
    b.tail(err)
    d0 = f.derivative_at_zero()
    integral = b.quad(_x_spec(f, f.eval))

    def g(x):
        e = np.exp(-TWO_PI * x)
        return -1j * odd_part(f, x, d0) * e / (1.0 + e)

    rhs = integral + b.quad(_boundary_spec(g, TWO_PI - f.growth_bound, breaks=(1.0,)))
    return _report("half_integer", f.spec, lhs, rhs, b, t0, atol=atol, rtol=rtol, diagnostics={"terms": n})


def eval_entry4(phi: AnalyticFunction, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                rtol: float = 1e-6) -> VerificationReport:
    """4 sum (-1)^n phi(2n+1) against int (phi(ix) + phi(-ix))/cosh(pi x/2) dx."""
    require_growth(phi, ENTRY45_GROWTH, "entry4")
    t0 = time.perf_counter()
    b = Budget(tol)
    s, err, n = integer_series(_fn_summand(phi, b), 2.0, 1.0, tol, alternating=True)
    b.tail(4 * err)

    def g(x):
        e = np.exp(-0.5 * PI * x)
        return even_part(phi, x) * 2.0 * e / (1.0 + e * e)

    rhs = b.quad(_boundary_spec(g, 0.5 * PI - phi.growth_bound, breaks=(1.0,)))
    return _report("entry4", phi.spec, 4.0 * s, rhs, b, t0, atol=atol, rtol=rtol, diagnostics={"terms": n})


def eval_entry5(phi: AnalyticFunction, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                rtol: float = 1e-6) -> VerificationReport:
    """phi(0)/2 + sum_{n>=1} (-1)^n phi(n) against (i/2) int (phi(ix) - phi(-ix))/sinh(pi x) dx."""
    require_growth(phi, ENTRY45_GROWTH, "entry5")
    t0 = time.perf_counter()
    b = Budget(tol)
    s, err, n = integer_series(_fn_summand(phi, b), 1.0, 0.0, tol, alternating=True)
    b.tail(err)
    lhs = s - 0.5 * phi.value_at_zero()
    d0 = phi.derivative_at_zero()

    def g(x):
        e = np.exp(-PI * x)
        return 0.5j * odd_part(phi, x, d0) * 2.0 * e / -np.expm1(-TWO_PI * x)

    rhs = b.quad(_boundary_spec(g, PI - phi.growth_bound, breaks=(1.0,)))
    return _report("entry5", phi.spec, lhs, rhs, b, t0, atol=atol, rtol=rtol, diagnostics={"terms": n})


def eval_entry6(phi: AnalyticFunction, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                rtol: float = 1e-6) -> VerificationReport:
    """sum phi(2n+1) against int phi/2 - (i/2) int (phi(ix) - phi(-ix))/(e^{pi x} + 1) dx."""
    require_growth(phi, ENTRY6_GROWTH, "entry6")
    t0 = time.perf_counter()
    b = Budget(tol)
    lhs, err, n = integer_series(_fn_summand(phi, b), 2.0, 1.0, tol)
    b.tail(err)
    d0 = phi.derivative_at_zero()
    integral = b.quad(_x_spec(phi, phi.eval))

    def g(x):
        e = np.exp(-PI * x)
        return -0.5j * odd_part(phi, x, d0) * e / (1.0 + e)

    rhs = 0.5 * integral + b.quad(_boundary_spec(g, PI - phi.growth_bound, breaks=(1.0,)))
    return _report("entry6", phi.spec, lhs, rhs, b, t0, atol=atol, rtol=rtol, diagnostics={"terms": n})


ROTATION_CUTOFF = 400.0


def eval_rotation_lemma(phi: AnalyticFunction, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                        rtol: float = 1e-6) -> VerificationReport:
    """int_0^inf e^{i pi x} phi(x) dx against i int_0^inf e^{-pi x} phi(ix) dx.

    For algebraically decaying phi the oscillatory tail beyond x = 400 is
    integrated by parts twice.
    """
    require_growth(phi, ENTRY6_GROWTH, "rotation_lemma")
    t0 = time.perf_counter()
    b = Budget(tol)

    def lhs_g(x):
        return np.exp(1j * PI * x) * phi.eval(x)

    diag = {}
    if phi.decay_rate > 0:
        lhs = b.quad(_x_spec(phi, lhs_g, breaks=tuple(np.arange(1.0, 8.0))))
    else:
        X = ROTATION_CUTOFF
        lhs = b.finite(lhs_g, 0.0, X, breaks=tuple(np.arange(1.0, X)))
        if phi.deriv is None:
            raise HypothesisViolation("rotation_lemma needs derivative metadata for algebraic decay")
        f0 = complex(phi.eval(np.array([X]))[0])
        f1, f1p, f1m = (complex(v) for v in phi.deriv(np.array([X, X + 1e-2, X - 1e-2])))
        ipi = 1j * PI
        tail = np.exp(ipi * X) * (-f0 / ipi + f1 / ipi ** 2)
        f2 = (f1p - f1m) / 2e-2
        b.tail(abs(f2) / PI ** 3)
        lhs = lhs + tail
        diag["cutoff"] = X

    def g(y):
        return 1j * np.exp(-PI * y) * phi.eval(1j * np.asarray(y))

    rhs = b.quad(_boundary_spec(g, PI - phi.growth_bound, breaks=(1.0,)))
    return _report("rotation_lemma", phi.spec, lhs, rhs, b, t0, atol=atol, rtol=rtol, diagnostics=diag)


def eval_ramanujan_alpha(phi: AnalyticFunction, alpha: float, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                         rtol: float = 1e-6) -> VerificationReport:
    """(2/sin(pi a)) sum {phi(2n+1-a) - phi(2n+1+a)} against
    int (phi(ix) + phi(-ix))/(cosh(pi x) + cos(pi a)) dx, for 0 < |a| < 1."""
    require_growth(phi, ENTRY6_GROWTH, "ramanujan_alpha")
    alpha = float(alpha)
    if not 0.0 < abs(alpha) < 1.0:
        raise ValueError("alpha must satisfy 0 < |alpha| < 1")
    t0 = time.perf_counter()
    b = Budget(tol)

    def psi(x):
        x = np.asarray(x)
        return phi.eval(x - alpha) - phi.eval(x + alpha)

    def dpsi(x):
        x = np.asarray(x)
        return phi.deriv(x - alpha) - phi.deriv(x + alpha)

    def integral_from(X):
        return b.finite(phi.eval, X - abs(alpha), X + abs(alpha)) * math.copysign(1.0, alpha)

    t = Summand(psi, dpsi if phi.deriv is not None else None, phi.decay_rate, (phi.power_decay or 2.0) + 1.0, integral_from)
    s, err, n = integer_series(t, 2.0, 1.0, tol)
    pref = 2.0 / math.sin(PI * alpha)
    b.tail(abs(pref) * err)
    c = math.cos(PI * alpha)

    def g(x):
        e = np.exp(-PI * x)
        return even_part(phi, x) * 2.0 * e / (1.0 + 2.0 * c * e + e * e)

    rhs = b.quad(_boundary_spec(g, PI - phi.growth_bound, breaks=(1.0,)))
    return _report("ramanujan_alpha", phi.spec, pref * s, rhs, b, t0, params={"alpha": alpha}, atol=atol,
                   rtol=rtol, diagnostics={"terms": n})


# ----------------------------------------------------------------------------
# eigenvalue-node formulas


def _check_p_formula(f: AnalyticFunction, formula_id: str, allow_origin_singularity: bool):
    require_growth(f, P_FORMULA_GROWTH, formula_id, allow_origin_singularity)


def _node_lhs(f: AnalyticFunction, params, table, budget: Budget, weighted: bool):
    p = params.p
    if weighted:
        t = Summand(lambda x: weight(p, x) * f.eval(x), None, f.decay_rate, f.power_decay,
                    lambda X: budget.quad(_x_spec(f, f.eval, lower=X)))
        if f.deriv is not None:
            t.df = lambda x: weight_derivative(p, x) * f.eval(x) + weight(p, x) * f.deriv(x)
    else:
        mu = _mu(p)
        t = Summand(f.eval, f.deriv, f.decay_rate, f.power_decay,
                    lambda X: budget.quad(_x_spec(f, lambda x: f.eval(x) * mu(x), lower=X)))
    if t.decay == 0 and t.df is None:
        raise HypothesisViolation("algebraically decaying functions need derivative metadata")
    val, err, n = node_series(params, table, t, budget.tol)
    budget.tail(err)
    return val, n


def _log_kernel(p: float):
    """-log(1 - sigma(-t) e^{-2 pi t}) without cancellation at either end."""
    def L(t):
        t = np.asarray(t, dtype=float)
        e = np.exp(-TWO_PI * t)
        a = (-(p + t) * np.expm1(-TWO_PI * t) + 2.0 * t * e) / (p + t)
        s = (p - t) / (p + t) * e
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t < 0.5, -np.log(a), -np.log1p(-s))
    return L


def eval_theorem1(f: AnalyticFunction, params, table: EigenTable | None = None, tol: float = DEFAULT_TOL,
                  atol: float = 1e-6, rtol: float = 1e-6, allow_origin_singularity: bool = False
                  ) -> VerificationReport:
    """sum f(lambda_n) against -f(0)/2 + int mu f - (1/2pi) int (f'(it) + f'(-it)) log(1/(1 - sigma(-t)e^{-2pi t})) dt."""
    _check_p_formula(f, "theorem1", allow_origin_singularity)
    if f.deriv is None:
        raise HypothesisViolation("theorem1 needs derivative metadata")
    params = as_params(params)
    p = params.p
    t0 = time.perf_counter()
    b = Budget(tol)
    lhs, n = _node_lhs(f, params, table, b, weighted=False)
    mu = _mu(p)
    integral = b.quad(_x_spec(f, lambda x: f.eval(x) * mu(x), breaks=_p_breaks(p)))
    L = _log_kernel(p)

    def g(t):
        it = 1j * np.asarray(t)
        return -(f.deriv(it) + f.deriv(-it)) * L(t) / TWO_PI

    bnd = b.quad(_boundary_spec(g, TWO_PI - f.growth_bound, breaks=_p_breaks(p), singular=Singularity.LOG_AT_ZERO))
    rhs = -0.5 * f.value_at_zero() + integral + bnd
    return _report("theorem1", f.spec, lhs, rhs, b, t0, p=p, atol=atol, rtol=rtol, diagnostics={"terms": n})


def _theorem3_kernel(p: float):
    """(sigma(-t) + sigma'(-t)/(2 pi))/(e^{2 pi t} - sigma(-t)) in overflow-free form."""
    def R(t):
        t = np.asarray(t, dtype=float)
        e = np.exp(-TWO_PI * t)
        den = (p + t) * (-(p + t) * np.expm1(-TWO_PI * t) + 2.0 * t * e)
        return (p * p - t * t + p / PI) * e / den
    return R


def eval_theorem3(f: AnalyticFunction, params, table: EigenTable | None = None, tol: float = DEFAULT_TOL,
                  atol: float = 1e-6, rtol: float = 1e-6, allow_origin_singularity: bool = False
                  ) -> VerificationReport:
    """sum f(lambda_n) against -f(0)/2 + int mu f + i int (f(it) - f(-it)) R(t) dt."""
    _check_p_formula(f, "theorem3", allow_origin_singularity)
    params = as_params(params)
    p = params.p
    t0 = time.perf_counter()
    b = Budget(tol)
    lhs, n = _node_lhs(f, params, table, b, weighted=False)
    mu = _mu(p)
    integral = b.quad(_x_spec(f, lambda x: f.eval(x) * mu(x), breaks=_p_breaks(p)))
    R = _theorem3_kernel(p)
    d0 = f.derivative_at_zero()

    def g(t):
        return 1j * odd_part(f, t, d0) * R(t)

    bnd = b.quad(_boundary_spec(g, TWO_PI - f.growth_bound, breaks=_p_breaks(p)))
    rhs = -0.5 * f.value_at_zero() + integral + bnd
    return _report("theorem3", f.spec, lhs, rhs, b, t0, p=p, atol=atol, rtol=rtol, diagnostics={"terms": n})


def eval_theorem4(f: AnalyticFunction, params, table: EigenTable | None = None, tol: float = DEFAULT_TOL,
                  atol: float = 1e-6, rtol: float = 1e-6, allow_origin_singularity: bool = False
                  ) -> VerificationReport:
    """sum w_n f(lambda_n) against -f(0)/(2(1 + 1/(pi p))) + int f + i int (f(ix) - f(-ix)) K(x) dx."""
    _check_p_formula(f, "theorem4", allow_origin_singularity)
    params = as_params(params)
    p = params.p
    t0 = time.perf_counter()
    b = Budget(tol)
    lhs, n = _node_lhs(f, params, table, b, weighted=True)
    integral = b.quad(_x_spec(f, f.eval))
    d0 = f.derivative_at_zero()

    def g(x):
        return 1j * odd_part(f, x, d0) * kernel_values(p, np.asarray(x, dtype=float))

    bnd = b.quad(_boundary_spec(g, TWO_PI - f.growth_bound, breaks=_p_breaks(p)))
    rhs = -0.5 * params.origin_factor * f.value_at_zero() + integral + bnd
    return _report("theorem4", f.spec, lhs, rhs, b, t0, p=p, atol=atol, rtol=rtol, diagnostics={"terms": n})


def eval_koshagain(phi: AnalyticFunction, params, table: EigenTable | None = None, tol: float = DEFAULT_TOL,
                   atol: float = 1e-6, rtol: float = 1e-6) -> VerificationReport:
    """sum w_n e^{i pi lambda_n} phi(2 lambda_n) against
    -phi(0)/(2(1 + 1/(pi p))) + (i/2) int (sigma(x/2)phi(ix) - phi(-ix))/(sigma(x/2)e^{pi x/2} - e^{-pi x/2}) dx.

    The integrand is used after multiplying through by (p - x/2), which
    removes the pole of sigma(x/2) at x = 2p.
    """
    require_growth(phi, ENTRY45_GROWTH, "koshagain")
    params = as_params(params)
    p = params.p
    t0 = time.perf_counter()
    b = Budget(tol)

    def term(x):
        x = np.asarray(x)
        return weight(p, x) * np.exp(1j * PI * x) * phi.eval(2.0 * x)

    t = Summand(term, None, 2.0 * phi.decay_rate, phi.power_decay)
    lhs, err, n = node_series(params, table, t, tol, alternating=True)
    b.tail(err)
    d0 = phi.derivative_at_zero()

    def g(x):
        x = np.asarray(x, dtype=float)
        e = np.exp(-PI * x)
        num = p * odd_part(phi, x, d0) + 0.5 * x * even_part(phi, x)
        den = -p * np.expm1(-PI * x) + 0.5 * x * (1.0 + e)
        return 0.5j * num * np.exp(-0.5 * PI * x) / den

    bnd = b.quad(_boundary_spec(g, 0.5 * PI - phi.growth_bound, breaks=_p_breaks(p)))
    rhs = -0.5 * params.origin_factor * phi.value_at_zero() + bnd
    return _report("koshagain", phi.spec, lhs, rhs, b, t0, p=p, atol=atol, rtol=rtol, diagnostics={"terms": n})


KOSHALT_TERMS = 8


def _one_minus_q(nu: float, x):
    """1 - e^{-x}(nu - x)/(nu + x) without cancellation near x = 0."""
    return (-(nu + x) * np.expm1(-x) + 2.0 * x * np.exp(-x)) / (nu + x)


def koshalt_term(params, n: int, tol: float = DEFAULT_TOL) -> complex:
    """int_0^inf e^{-nx}((2 pi p - x)/(2 pi p + x))^n f1(x) dx for f1(y) = y e^{-y}."""
    nu = TWO_PI * as_params(params).p
    f1 = preset("mellin_pair").laplace_density

    def g(x):
        x = np.asarray(x, dtype=float)
        return (np.exp(-x) * (nu - x) / (nu + x)) ** n * f1(x)

    brk = (nu,) if nu < 60 else ()
    return integrate_semi_infinite(IntegrandSpec(g, decay_rate=1.0 + n, panel_breaks=brk), tol).value


def eval_koshalt(params, table: EigenTable | None = None, tol: float = DEFAULT_TOL, atol: float = 1e-5,
                 rtol: float = 1e-5) -> VerificationReport:
    """The Laplace-pair identity for f1(y) = y e^{-y}, f(x) = 1/(1 + x)^2.

    Series side: the first terms by separate quadratures plus the remaining
    geometric tail summed inside one integral,
        sum_{n > N} int q^n f1 = int f1 q^{N+1}/(1 - q),  q = e^{-x}(2 pi p - x)/(2 pi p + x).
    Integral side: -f(0)/2 + int f/(1 + 1/(pi p)) - 2 int Im-part f(ix) sigma_p(2 pi x) dx.
    """
    params = as_params(params)
    p = params.p
    nu = TWO_PI * p
    t0 = time.perf_counter()
    b = Budget(tol)
    fpair = preset("mellin_pair")
    f1 = fpair.laplace_density
    brk = (nu,) if nu < 60 else ()
    terms = []
    for k in range(1, KOSHALT_TERMS + 1):
        def g(x, k=k):
            x = np.asarray(x, dtype=float)
            return (np.exp(-x) * (nu - x) / (nu + x)) ** k * f1(x)
        terms.append(b.quad(IntegrandSpec(g, decay_rate=1.0 + k, panel_breaks=brk)))

    def rest(x):
        x = np.asarray(x, dtype=float)
        q = np.exp(-x) * (nu - x) / (nu + x)
        return f1(x) * q ** (KOSHALT_TERMS + 1) / _one_minus_q(nu, x)

    tail = b.quad(IntegrandSpec(rest, decay_rate=KOSHALT_TERMS + 2.0, panel_breaks=brk))
    lhs = fsum_complex(terms) + tail

    if table is None:
        table = shared_table(params, 256)
    lam1 = float(table.lambdas[0])
    integral = b.quad(_x_spec(fpair, fpair.eval))
    d0 = fpair.derivative_at_zero()

    def h(x):
        x = np.asarray(x, dtype=float)
        return -2.0 * (odd_part(fpair, x, d0) / 2j) * sigma_p(params, TWO_PI * x, table)

    bnd = b.quad(IntegrandSpec(h, decay_rate=TWO_PI * lam1, panel_breaks=_p_breaks(p)))
    rhs = -0.5 * fpair.value_at_zero() + params.origin_factor * integral + bnd
    return _report("koshalt", fpair.spec, lhs, rhs, b, t0, p=p, atol=atol, rtol=rtol,
                   diagnostics={"direct_terms": KOSHALT_TERMS})


__all__ = [
    "eval_abel_plana", "eval_theorem1", "eval_theorem3", "eval_theorem4", "eval_half_integer",
    "eval_entry4", "eval_entry5", "eval_entry6", "eval_rotation_lemma", "eval_koshagain",
    "eval_koshalt", "eval_ramanujan_alpha", "koshalt_term", "odd_part", "even_part",
    "integer_series", "node_series", "Summand", "Budget", "TailEstimate",
]
