"""Lambert-type and Eisenstein-type identities over the eigenvalue nodes.

Eisenstein-type identities carry a principal-value integral whose prefactor
is sin(pi n/2).  For even integer n that prefactor is exactly zero and the
integral is not computed at all; ``pv_integral_count`` exposes how many were
computed so this can be checked.
"""

from __future__ import annotations

import cmath
import math
import threading
import time

import numpy as np
import scipy.special as sps

from .eigen import EigenTable, as_params, shared_table, weight
from .errors import HypothesisViolation
from .kernels import kernel_values
from .quad import IntegrandSpec, PVPole, Singularity, estimate_residue
from .report import VerificationReport
from .sumform import Budget, Summand, integer_series, node_series
from .zeta import kernel_moment, riemann_zeta, zeta_p_via_functional_eq

PI = math.pi
TWO_PI = 2.0 * math.pi
DUAL_RTOL = 1e-12
DEFAULT_TOL = 1e-11

_lock = threading.Lock()
_pv_count = 0


def pv_integral_count() -> int:
    """Number of principal-value integrals computed by this module so far."""
    return _pv_count


def _count_pv() -> None:
    global _pv_count
    with _lock:
        _pv_count += 1


def half_pi_trig(n: complex) -> tuple[complex, complex]:
    """(cos(pi n/2), sin(pi n/2)), exact for integer n."""
    n = complex(n)
    if n.imag == 0 and float(n.real).is_integer():
        r = int(n.real) % 4
        return complex((1, 0, -1, 0)[r]), complex((0, 1, 0, -1)[r])
    return cmath.cos(PI * n / 2), cmath.sin(PI * n / 2)


def check_dual(alpha: float, beta: float, product: float, rtol: float = DUAL_RTOL) -> None:
    """Require alpha, beta > 0 and alpha*beta = product to relative ``rtol``."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    if abs(alpha * beta / product - 1.0) > rtol:
        raise ValueError(f"alpha*beta = {alpha * beta!r} differs from {product!r} by more than {rtol:g} relative")


def normalize_dual(alpha: float, beta: float, product: float, rtol: float = 1e-6) -> tuple[float, float]:
    """Validate user-supplied (alpha, beta) loosely and return (alpha, product/alpha)."""
    check_dual(alpha, beta, product, rtol)
    return float(alpha), product / float(alpha)


def _require_order(n: complex) -> complex:
    n = complex(n)
    if not n.real > 2:
        raise HypothesisViolation("Eisenstein-type identities are evaluated for Re(n) > 2 only")
    return n


def _gamma(x: complex) -> complex:
    x = complex(x)
    return complex(sps.gamma(x)) if x.imag else complex(sps.gamma(x.real))


def _power_singularity(exponent: complex):
    """Endpoint treatment for an integrand behaving like x**exponent times an analytic function."""
    e = complex(exponent)
    if e.imag == 0 and e.real >= 0 and float(e.real).is_integer():
        return Singularity.NONE, 0.0
    return Singularity.ALGEBRAIC_AT_ZERO, min(e.real, 0.0) if e.real < 0 else e.real


def _spec(f, rate, exponent, poles=(), breaks=()):
    sing, a = _power_singularity(exponent)
    return IntegrandSpec(f, decay_rate=rate, endpoint_singularity=sing, singularity_exponent=a,
                         pv_poles=poles, panel_breaks=breaks)


def _report(formula_id, lhs, rhs, b: Budget, t0, p=None, params=None, diagnostics=None, atol=1e-6, rtol=1e-6,
            function_id="-"):
    return VerificationReport(formula_id=formula_id, function_id=function_id, lhs=lhs, rhs=rhs, p=p,
                              params=params or {}, sum_tail=b.sum_tail, quad_errors=list(b.quad_errors),
                              atol=atol, rtol=rtol, wall_time=time.perf_counter() - t0,
                              diagnostics=diagnostics or {})


def _num(v: complex):
    v = complex(v)
    return v.real if v.imag == 0 else v


# ----------------------------------------------------------------------------
# Lambert-type


def eval_theorem5(params, w, z, table: EigenTable | None = None, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                  rtol: float = 1e-6) -> VerificationReport:
    """sum w_n lambda_n^{w-1} e^{-lambda_n z} against
    Gamma(w) z^{-w} + 2 int y^{w-1} cos(pi w/2 - z y) K(y) dy.

    Requires Re(w) > 1, Re(z) > 0 and |Im(z)| < 2 pi.
    """
    params = as_params(params)
    p = params.p
    w, z = complex(w), complex(z)
    if not (w.real > 1 and z.real > 0):
        raise HypothesisViolation("theorem5 needs Re(w) > 1 and Re(z) > 0")
    if not abs(z.imag) < TWO_PI:
        raise HypothesisViolation("theorem5 needs |Im(z)| < 2 pi for the integral to converge")
    t0 = time.perf_counter()
    b = Budget(tol)

    def term(x):
        x = np.asarray(x, dtype=float)
        return weight(p, x) * x ** (w - 1.0) * np.exp(-z * x)

    lhs, err, nterms = node_series(params, table, Summand(term, None, z.real, None), tol)
    b.tail(err)

    def g(y):
        y = np.asarray(y, dtype=float)
        # y K(y) is analytic at 0
        return 2.0 * y ** (w - 2.0) * np.cos(PI * w / 2 - z * y) * (y * kernel_values(p, y))

    bps = sorted({x for x in (0.1 * p, p, 10 * p, 0.5, 2.0) if 1e-12 < x < 50})
    integral = b.quad(_spec(g, TWO_PI - abs(z.imag), w - 2.0, breaks=bps))
    rhs = _gamma(w) * z ** (-w) + integral
    return _report("theorem5", lhs, rhs, b, t0, p=p, params={"w": _num(w), "z": _num(z)},
                   diagnostics={"terms": nterms}, atol=atol, rtol=rtol)


def eval_corollary_half_lambert(w, z, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                                rtol: float = 1e-6) -> VerificationReport:
    """e^{z/2} sum_{n>=1} (n - 1/2)^{w-1} e^{-nz} against
    Gamma(w) z^{-w} - 2 int y^{w-1} cos(pi w/2 - z y)/(e^{2 pi y} + 1) dy."""
    w, z = complex(w), complex(z)
    if not (w.real > 1 and z.real > 0):
        raise HypothesisViolation("half_lambert needs Re(w) > 1 and Re(z) > 0")
    if not abs(z.imag) < TWO_PI:
        raise HypothesisViolation("half_lambert needs |Im(z)| < 2 pi")
    t0 = time.perf_counter()
    b = Budget(tol)

    def term(x):
        x = np.asarray(x, dtype=float)
        return x ** (w - 1.0) * np.exp(-z * x)

    lhs, err, nterms = integer_series(Summand(term, None, z.real, None), 1.0, 0.5, tol)
    b.tail(err)

    def g(y):
        y = np.asarray(y, dtype=float)
        e = np.exp(-TWO_PI * y)
        return -2.0 * y ** (w - 1.0) * np.cos(PI * w / 2 - z * y) * e / (1.0 + e)

    rhs = _gamma(w) * z ** (-w) + b.quad(_spec(g, TWO_PI - abs(z.imag), w - 1.0, breaks=(1.0,)))
    return _report("half_lambert", lhs, rhs, b, t0, params={"w": _num(w), "z": _num(z)},
                   diagnostics={"terms": nterms}, atol=atol, rtol=rtol)


# ----------------------------------------------------------------------------
# Eisenstein-type


def _bose_sum(n: complex, a: float, tol: float, shift: float = 1.0, sign: float = -1.0):
    """sum_{k>=0} x^{n-1}/(e^{a x} + sign), x = k + shift."""
    def term(x):
        x = np.asarray(x, dtype=float)
        e = np.exp(-a * x)
        return x ** (n - 1.0) * e / (1.0 + sign * e)

    return integer_series(Summand(term, None, a, None), 1.0, shift, tol)


def _pv_window_end(rate: float, tol: float, power: float = 0.0) -> float:
    """Abscissa beyond which an x**power e^{-rate x} integrand is negligible at tol.

    Poles are declared out to here, so it has to lie past the truncation point
    the quadrature picks.
    """
    k = max(power, 0.0)
    X = (math.log(1.0 / tol) + 10.0) / rate
    for _ in range(20):
        X = (math.log(1.0 / tol) + 10.0 + k * math.log(max(X, 1.0))) / rate
    return X + 4.0 / rate


def eval_entry_ab(n, alpha: float, beta: float, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                  rtol: float = 1e-6) -> VerificationReport:
    """The Eisenstein-type transformation with Riemann zeta and a cot principal value.

    alpha^{n/2}(Gamma(n)zeta(n)/(2pi)^n + cos(pi n/2) S(alpha))
      = beta^{n/2}(cos(pi n/2)Gamma(n)zeta(n)/(2pi)^n + S(beta)
                   - sin(pi n/2) PV int x^{n-1} cot(beta x/2)/(e^{2pi x} - 1) dx),
    S(a) = sum_k k^{n-1}/(e^{a k} - 1), alpha*beta = 4 pi^2, Re(n) > 2.
    """
    n = _require_order(n)
    alpha, beta = float(alpha), float(beta)
    check_dual(alpha, beta, 4.0 * PI ** 2)
    t0 = time.perf_counter()
    b = Budget(tol)
    c, s = half_pi_trig(n)
    zeta_term = _gamma(n) * riemann_zeta(n) / TWO_PI ** n
    sa, ea, _ = _bose_sum(n, alpha, tol)
    sb, eb, _ = _bose_sum(n, beta, tol)
    b.tail(abs(alpha ** (n / 2)) * ea + abs(beta ** (n / 2)) * eb)
    pv = 0j
    diag = {"pv_skipped": s == 0}
    if s != 0:
        def f(x):
            x = np.asarray(x, dtype=float)
            e = np.exp(-TWO_PI * x)
            h = 0.5 * beta * x
            return x ** (n - 1.0) * e / -np.expm1(-TWO_PI * x) * np.cos(h) / np.sin(h)

        X = _pv_window_end(TWO_PI, tol, complex(n).real - 1.0)
        poles = []
        k = 1
        while TWO_PI * k / beta < X:
            zk = TWO_PI * k / beta
            res = zk ** (n - 1.0) * math.exp(-TWO_PI * zk) / -math.expm1(-TWO_PI * zk) * 2.0 / beta
            poles.append(PVPole(zk, complex(res)))
            k += 1
        pv = b.quad(_spec(f, TWO_PI, n - 3.0, poles=poles))
        _count_pv()
        diag.update({"pv_poles": len(poles), "pv": pv})
    lhs = alpha ** (n / 2) * (zeta_term + c * sa)
    rhs = beta ** (n / 2) * (c * zeta_term + sb - s * pv)
    return _report("entry_ab", lhs, rhs, b, t0, params={"n": _num(n), "alpha": alpha, "beta": beta},
                   diagnostics=diag, atol=atol, rtol=rtol)


def eisenstein_bracket(p: float, beta: float, z):
    """(A- - A+)/((A+ - 1)(A- - 1)) with A+- = sigma(+-i beta z/2pi) e^{+-i beta z}."""
    z = np.asarray(z, dtype=float)
    u = beta * z / TWO_PI
    # for real u, sigma(iu) = e^{2i atan(u/p)}, so A+- = e^{+-i phi}; reducing u
    # keeps the phase exact, and A+- - 1 is formed without cancellation near
    # the zeros of phi (z -> 0 in particular)
    phi = 2.0 * PI * (u - np.round(u)) + 2.0 * np.arctan(u / p)
    half = np.sin(0.5 * phi)
    a_plus_m1 = -2.0 * half ** 2 + 1j * np.sin(phi)
    a_minus_m1 = np.conj(a_plus_m1)
    return (a_minus_m1 - a_plus_m1) / (a_plus_m1 * a_minus_m1)


def bracket_imag_defect(p: float, beta: float, poles, samples: int = 64) -> float:
    """Largest |Im(i B)|/max(|B|, 1) of the bracket B between its first poles.

    i B is real for real z, so this measures rounding in the complex
    evaluation.  Points within a thousandth of a gap of a pole are skipped.
    """
    poles = np.asarray(poles, dtype=float)[:8]
    edges = np.concatenate([[0.0], poles])
    if edges.size < 2:
        edges = np.array([0.0, TWO_PI / beta])
    t = np.linspace(1e-3, 1.0 - 1e-3, samples)
    z = (edges[:-1, None] + t[None, :] * np.diff(edges)[:, None]).ravel()
    bv = eisenstein_bracket(p, beta, z)
    return float(np.max(np.abs((1j * bv).imag) / np.maximum(np.abs(bv), 1.0)))


def _node_kernel_sum(params, table, n: complex, scale: float, tol: float):
    """sum_j w_j lambda_j^{n-1} K(scale * lambda_j)."""
    p = params.p

    def term(x):
        x = np.asarray(x, dtype=float)
        return weight(p, x) * x ** (n - 1.0) * kernel_values(p, scale * x)

    return node_series(params, table, Summand(term, None, TWO_PI * scale, None), tol)


def eval_thm_eisenstein_p(params, n, alpha: float, beta: float, table: EigenTable | None = None,
                          tol: float = DEFAULT_TOL, atol: float = 1e-6, rtol: float = 1e-6) -> VerificationReport:
    """The eigenvalue-node generalization of the Eisenstein-type transformation.

    alpha^{n/2}(M + cos(pi n/2) S(alpha)) = beta^{n/2}(cos(pi n/2) M + S(beta) - i sin(pi n/2) PV),
    M = Gamma(n) eta_p(n)/(2 pi)^n = int z^{n-1} K(z) dz,
    S(a) = sum_j w_j lambda_j^{n-1} K(a lambda_j/2pi),
    PV = PV int z^{n-1} K(z) B(z) dz with B the bracket of :func:`eisenstein_bracket`,
    whose poles sit at z = 2 pi lambda_j/beta.
    """
    params = as_params(params)
    p = params.p
    n = _require_order(n)
    alpha, beta = float(alpha), float(beta)
    check_dual(alpha, beta, 4.0 * PI ** 2)
    t0 = time.perf_counter()
    b = Budget(tol)
    c, s = half_pi_trig(n)
    moment, merr = kernel_moment(params, n, tol)
    b.quad_errors.append(merr)
    sa, ea, _ = _node_kernel_sum(params, table, n, alpha / TWO_PI, tol)
    sb, eb, _ = _node_kernel_sum(params, table, n, beta / TWO_PI, tol)
    b.tail(abs(alpha ** (n / 2)) * ea + abs(beta ** (n / 2)) * eb)
    diag = {"pv_skipped": s == 0, "moment": moment, "sum_alpha": sa, "sum_beta": sb}
    pv = 0j
    if s != 0:
        def f(z):
            z = np.asarray(z, dtype=float)
            return z ** (n - 2.0) * (z * kernel_values(p, z)) * eisenstein_bracket(p, beta, z)

        X = _pv_window_end(TWO_PI, tol, complex(n).real - 1.0)
        need = int(X * beta / TWO_PI) + 8
        tab = table if table is not None and table.count >= need else shared_table(params, need)
        locs = TWO_PI * tab.lambdas / beta
        locs = locs[locs < X]
        poles = [PVPole(float(zj)) for zj in locs]
        bps = [x for x in (0.1 * p, p, 10 * p) if 1e-12 < x < float(locs[0]) * 0.5] if locs.size else []
        pv = b.quad(_spec(f, TWO_PI, n - 3.0, poles=poles, breaks=bps))
        _count_pv()
        # residues: numeric estimate vs the weight-based prediction, first few poles
        devs = []
        for zj in locs[:3]:
            H = 0.25 * TWO_PI / beta
            got = estimate_residue(f, float(zj), min(1e-4, 1e-2 * H))
            lam = beta * zj / TWO_PI
            pred = (zj ** (n - 1.0) * complex(kernel_values(p, zj)) * -2j * float(weight(p, lam)) / beta)
            devs.append(abs(got - pred) / abs(pred))
        term = -1j * s * pv
        diag.update({"pv": pv, "pv_poles": len(poles), "residue_rel_dev": float(max(devs)) if devs else 0.0,
                     "pv_imag_defect": abs(term.imag) / max(abs(term), 1e-300) if n.imag == 0 else 0.0,
                     "bracket_imag_defect": bracket_imag_defect(p, beta, locs)})
    lhs = alpha ** (n / 2) * (moment + c * sa)
    rhs = beta ** (n / 2) * (c * moment + sb - 1j * s * pv)
    return _report("thm_eisenstein_p", lhs, rhs, b, t0, p=p,
                   params={"n": _num(n), "alpha": alpha, "beta": beta}, diagnostics=diag, atol=atol, rtol=rtol)


def eval_corollary_half_eisenstein(n, alpha: float, beta: float, tol: float = DEFAULT_TOL, atol: float = 1e-6,
                                   rtol: float = 1e-6) -> VerificationReport:
    """Half-integer version of the Eisenstein-type transformation.

    T(beta) + E/beta^n = cos(pi n/2)((alpha/beta)^{n/2} T(alpha) + E/(2pi)^n)
                         - sin(pi n/2) PV int z^{n-1} tan(beta z/2)/(e^{2pi z} + 1) dz,
    T(a) = sum_j (j - 1/2)^{n-1}/(e^{a(j - 1/2)} + 1), E = Gamma(n)(2^{1-n} - 1)zeta(n).
    """
    n = _require_order(n)
    alpha, beta = float(alpha), float(beta)
    check_dual(alpha, beta, 4.0 * PI ** 2)
    t0 = time.perf_counter()
    b = Budget(tol)
    c, s = half_pi_trig(n)
    E = _gamma(n) * (2.0 ** (1.0 - n) - 1.0) * riemann_zeta(n)
    ta, ea, _ = _bose_sum(n, alpha, tol, shift=0.5, sign=1.0)
    tb, eb, _ = _bose_sum(n, beta, tol, shift=0.5, sign=1.0)
    ratio = (alpha / beta) ** (n / 2)
    b.tail(eb + abs(ratio) * ea)
    diag = {"pv_skipped": s == 0, "sum_alpha": ta, "sum_beta": tb}
    pv = 0j
    if s != 0:
        def f(z):
            z = np.asarray(z, dtype=float)
            e = np.exp(-TWO_PI * z)
            h = 0.5 * beta * z
            return z ** (n - 1.0) * e / (1.0 + e) * np.sin(h) / np.cos(h)

        X = _pv_window_end(TWO_PI, tol, complex(n).real - 1.0)
        poles = []
        k = 1
        while (2 * k - 1) * PI / beta < X:
            zk = (2 * k - 1) * PI / beta
            res = -zk ** (n - 1.0) * math.exp(-TWO_PI * zk) / (1.0 + math.exp(-TWO_PI * zk)) * 2.0 / beta
            poles.append(PVPole(zk, complex(res)))
            k += 1
        pv = b.quad(_spec(f, TWO_PI, n - 1.0, poles=poles))
        _count_pv()
        diag.update({"pv_poles": len(poles), "pv": pv})
    lhs = tb + E / beta ** n
    rhs = c * (ratio * ta + E / TWO_PI ** n) - s * pv
    return _report("half_eisenstein", lhs, rhs, b, t0, params={"n": _num(n), "alpha": alpha, "beta": beta},
                   diagnostics=diag, atol=atol, rtol=rtol)


def eval_corollary_zeta_odd(params, m: int, alpha: float, beta: float, table: EigenTable | None = None,
                            tol: float = DEFAULT_TOL, atol: float = 1e-6, rtol: float = 1e-6) -> VerificationReport:
    """alpha^{m+1}{zeta_p(-2m-1)/2 + S(alpha)} = (-beta)^{m+1}{zeta_p(-2m-1)/2 + S(beta)},
    S(a) = sum_j w_j lambda_j^{2m+1} K(a lambda_j/pi), alpha*beta = pi^2.

    The diagnostics carry both brackets; at alpha = beta with m even they
    must vanish individually.
    """
    params = as_params(params)
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")
    alpha, beta = float(alpha), float(beta)
    check_dual(alpha, beta, PI ** 2)
    t0 = time.perf_counter()
    b = Budget(tol)
    zv = zeta_p_via_functional_eq(params, m, tol)
    b.quad_errors.append(zv.error_estimate)
    n = 2 * m + 2
    sa, ea, _ = _node_kernel_sum(params, table, n, alpha / PI, tol)
    sb, eb, _ = _node_kernel_sum(params, table, n, beta / PI, tol)
    b.tail(alpha ** (m + 1) * ea + beta ** (m + 1) * eb)
    bra = 0.5 * zv.value + sa
    brb = 0.5 * zv.value + sb
    lhs = alpha ** (m + 1) * bra
    rhs = (-beta) ** (m + 1) * brb
    diag = {"bracket_alpha": bra, "bracket_beta": brb, "zeta_p_neg": zv.value}
    return _report("zeta_odd", lhs, rhs, b, t0, p=params.p, params={"m": m, "alpha": alpha, "beta": beta},
                   diagnostics=diag, atol=atol, rtol=rtol)


def zeta_odd_limit_sides(m: int, alpha: float, beta: float, tol: float = DEFAULT_TOL):
    """Both sides of the zeta-odd identity in the p -> 0 limit, from closed forms.

    There lambda_j = j - 1/2, w_j = 1, K(x) = -1/(e^{2 pi x} + 1) and
    zeta_p(-2m-1) = 2 cos(pi s/2) Gamma(s) (2pi)^{-s} (2^{1-s} - 1) zeta(s), s = 2m + 2.
    Returns (lhs, rhs, bracket_alpha, bracket_beta).
    """
    m = int(m)
    check_dual(alpha, beta, PI ** 2)
    s = 2 * m + 2
    zneg = (2.0 * (-1.0) ** (m + 1) * math.gamma(s) / TWO_PI ** s * (2.0 ** (1 - s) - 1.0)
            * riemann_zeta(s).real)
    n = 2 * m + 2
    ta, _, _ = _bose_sum(n, 2.0 * alpha, tol, shift=0.5, sign=1.0)
    tb, _, _ = _bose_sum(n, 2.0 * beta, tol, shift=0.5, sign=1.0)
    bra = 0.5 * zneg - ta
    brb = 0.5 * zneg - tb
    return alpha ** (m + 1) * bra, (-beta) ** (m + 1) * brb, bra, brb


__all__ = [
    "eval_theorem5", "eval_corollary_half_lambert", "eval_entry_ab", "eval_thm_eisenstein_p",
    "eval_corollary_half_eisenstein", "eval_corollary_zeta_odd", "zeta_odd_limit_sides",
    "eisenstein_bracket", "bracket_imag_defect", "half_pi_trig", "check_dual", "normalize_dual",
    "pv_integral_count",
]
