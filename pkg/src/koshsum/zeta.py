"""The zeta functions zeta_p(s) and eta_p(s) over the eigenvalue nodes.

    zeta_p(s) = sum_j w_j lambda_j^{-s}
    eta_p(s)  = sum_k (s, k nu)_k k^{-s},   nu = 2 pi p
    (s, k nu)_k = (1/Gamma(s)) int_0^inf e^{-x} ((k nu - x)/(k nu + x))^k x^{s-1} dx

eta_p also has the integral representation
    Gamma(n) eta_p(n) / (2 pi)^n = int_0^inf z^{n-1} K(z) dz,
which together with the reflection
    zeta_p(1 - s) = 2 cos(pi s/2) Gamma(s) (2 pi)^{-s} eta_p(s)
gives zeta_p at negative odd integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.special as sps

from .eigen import EigenTable, as_params, lambda_continuous, shared_table, weight, weight_derivative
from .errors import SlowConvergence
from .kernels import kernel_values
from .quad import IntegrandSpec, Singularity, integrate_semi_infinite
from .series import averaged_partial_sums, fsum_complex, node_tail

PI = math.pi
TWO_PI = 2.0 * math.pi
SERIES_NODES = 4096
ETA_DIRECT_TERMS = 64
AVERAGING_LEVELS = 12


@dataclass(frozen=True)
class ZetaValue:
    """A zeta value with its provenance and error estimate.

    Attributes
    ----------
    s : complex
    value : complex
    method : str
        One of "series", "integral_rep", "functional_eq".
    error_estimate : float
        Strictly positive.
    p : float
    """

    s: complex
    value: complex
    method: str
    error_estimate: float
    p: float

    def to_dict(self) -> dict:
        """JSON-ready form; s and value are numbers when real, else {"re", "im"}."""
        def num(v):
            v = complex(v)
            return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}
        return {"s": num(self.s), "p": self.p, "method": self.method, "value": num(self.value),
                "error_estimate": self.error_estimate}


def _positive(err: float) -> float:
    return max(float(err), 1e-300)


def _is_nonneg_integer(x: complex) -> bool:
    return x.imag == 0 and x.real >= 0 and float(x.real).is_integer()


def hurwitz_zeta(s: complex, a: float) -> complex:
    """sum_{k >= 0} (k + a)^{-s} for Re(s) > 1."""
    s = complex(s)
    if s.imag == 0:
        return complex(sps.zeta(s.real, a))
    return complex(mpmath.zeta(s, a))


def riemann_zeta(s: complex) -> complex:
    return hurwitz_zeta(s, 1.0)


def zeta_p_series(params, s, table: EigenTable | None = None, tol: float = 1e-12) -> ZetaValue:
    """zeta_p(s) by direct summation over the nodes plus an Euler-Maclaurin tail.

    Raises
    ------
    ValueError
        If Re(s) <= 1.
    SlowConvergence
        If the tail remainder exceeds ``tol``.
    """
    params = as_params(params)
    s = complex(s)
    if not s.real > 1:
        raise ValueError("the zeta_p series needs Re(s) > 1")
    n = SERIES_NODES
    if table is None or table.count < n:
        table = shared_table(params, n)
    lam = table.lambdas[:n]
    w = table.weights[:n]
    direct = fsum_complex(w * lam ** (-s))

    def dg(x):
        return weight_derivative(params, x) * x ** (-s) - s * weight(params, x) * x ** (-s - 1.0)

    edge = float(lambda_continuous(params, n + 0.5))
    tail = node_tail(params, n, dg, edge ** (1.0 - s) / (s - 1.0))
    err = tail.error + 4 * n * np.finfo(float).eps * abs(direct)
    if tail.error > tol and s.real < 1.5:
        raise SlowConvergence(f"zeta_p tail remainder {tail.error:.3g} exceeds {tol:.3g}")
    return ZetaValue(s, direct + tail.value, "series", _positive(err), params.p)


def _base_power(x: np.ndarray, a: float, k: int) -> np.ndarray:
    """((a - x)/(a + x))^k for x >= 0 without loss for large k."""
    with np.errstate(divide="ignore"):
        mag = np.exp(k * np.log1p(-2.0 * np.minimum(x, a) / (a + x)))
        far = np.exp(k * np.log((x - a).clip(min=0.0) / (x + a)))
    sign = -1.0 if k % 2 else 1.0
    return np.where(x <= a, mag, sign * far)


def coeff_s_nu_k(s, nu: float, k: int, tol: float = 1e-13, with_error: bool = False):
    """(s, k nu)_k = (1/Gamma(s)) int_0^inf e^{-x} ((k nu - x)/(k nu + x))^k x^{s-1} dx.

    Panels break at x = k nu, where the base changes sign.
    """
    s = complex(s)
    if not s.real > 0:
        raise ValueError("coeff_s_nu_k needs Re(s) > 0")
    if not nu > 0:
        raise ValueError("nu must be positive")
    k = int(k)
    if k < 1:
        raise ValueError("k must be a positive integer")
    a = k * float(nu)
    smooth = _is_nonneg_integer(s - 1.0)

    def f(x):
        x = np.asarray(x, dtype=float)
        pw = x ** (s - 1.0) if not smooth else x ** int((s - 1.0).real)
        return np.exp(-x) * _base_power(x, a, k) * pw

    breaks = (a,) if a < 700 else ()
    spec = IntegrandSpec(f, decay_rate=1.0, panel_breaks=breaks,
                         endpoint_singularity=Singularity.NONE if smooth else Singularity.ALGEBRAIC_AT_ZERO,
                         singularity_exponent=0.0 if smooth else min(s.real - 1.0, 0.0))
    rg = complex(sps.rgamma(s)) if s.imag else float(sps.rgamma(s.real))
    # tol is relative to the coefficient scale, which is at most 1
    r = integrate_semi_infinite(spec, tol / abs(rg))
    value = complex(r.value * rg)
    return (value, abs(rg) * r.error_estimate) if with_error else value


def _poch(s: complex, m: int) -> complex:
    out = 1.0 + 0j
    for j in range(m):
        out *= s + j
    return out


def coeff_asymptotic(s, nu: float):
    """Coefficients (c0, c2, c4, c6) with (s, k nu)_k ~ c0 + c2/k^2 + c4/k^4 + c6/k^6.

    Obtained by expanding k log((1 - t)/(1 + t)), t = x/(k nu), in powers of
    1/k and integrating term by term against e^{-(1 + 2/nu) x} x^{s-1}.
    """
    s = complex(s)
    r = 1.0 / (nu + 2.0)          # 1/(nu a) with a = 1 + 2/nu
    c0 = (nu * r) ** s            # a^{-s}
    c2 = -(2.0 / 3.0) * _poch(s, 3) * r ** 3
    c4 = (2.0 / 9.0) * _poch(s, 6) * r ** 6 - (2.0 / 5.0) * _poch(s, 5) * r ** 5
    c6 = (-(2.0 / 7.0) * _poch(s, 7) * r ** 7 + (4.0 / 15.0) * _poch(s, 8) * r ** 8
          - (4.0 / 81.0) * _poch(s, 9) * r ** 9)
    return c0, c0 * c2, c0 * c4, c0 * c6


def eta_p_series(params, s, tol: float = 1e-12, terms: int = ETA_DIRECT_TERMS) -> ZetaValue:
    """eta_p(s) = sum_k (s, k nu)_k / k^s.

    The first ``terms`` coefficients come from quadrature.  Beyond them the
    smooth part of the coefficients follows an asymptotic expansion in 1/k^2
    whose sum is a combination of Hurwitz zeta values; what is left over is
    a residual that either decays like e^{-k nu} or, for small nu, alternates
    in sign, and is summed by averaging its partial sums.
    """
    params = as_params(params)
    s = complex(s)
    if not s.real > 1:
        raise ValueError("the eta_p series needs Re(s) > 1")
    nu = TWO_PI * params.p
    k = np.arange(1, terms + 1, dtype=float)
    coeffs, qerr = [], 0.0
    for kk in range(1, terms + 1):
        c, e = coeff_s_nu_k(s, nu, kk, max(tol * 0.1, 1e-13), with_error=True)
        coeffs.append(c)
        qerr += e * kk ** (-s.real)
    coeffs = np.array(coeffs)
    c0, c2, c4, c6 = coeff_asymptotic(s, nu)
    smooth = c0 + c2 / k ** 2 + c4 / k ** 4 + c6 / k ** 6
    resid = (coeffs - smooth) * k ** (-s)
    est = averaged_partial_sums(resid, AVERAGING_LEVELS)
    start = terms + 1.0
    smooth_total = (c0 * riemann_zeta(s) + c2 * riemann_zeta(s + 2) + c4 * riemann_zeta(s + 4)
                    + c6 * riemann_zeta(s + 6))
    value = smooth_total + est.value
    # first omitted term of the expansion, summed over k > terms
    c8 = abs(c6) * (abs(s) + 9.0) ** 2 / (nu + 2.0) ** 2
    trunc = c8 * abs(hurwitz_zeta(s.real + 8.0, start))
    err = est.error + qerr + trunc
    return ZetaValue(s, value, "series", _positive(err), params.p)


def kernel_moment(params, n: complex, tol: float):
    """int_0^inf z^{n-1} K(z) dz and its error estimate, Re(n) > 1."""
    p = params.p
    n = complex(n)
    if not n.real > 1:
        raise ValueError("the integral representation needs Re(n) > 1")
    smooth = _is_nonneg_integer(n - 2.0)

    def f(z):
        z = np.asarray(z, dtype=float)
        kz = kernel_values(p, z)
        if smooth:
            # z K(z) is analytic at 0
            return z ** int((n - 2.0).real) * (z * kz)
        return z ** (n - 2.0) * (z * kz)

    breaks = sorted({b for b in (0.1 * p, p, 10 * p, 0.5, 2.0) if 1e-12 < b < 50})
    spec = IntegrandSpec(f, decay_rate=TWO_PI, panel_breaks=breaks,
                         endpoint_singularity=Singularity.NONE if smooth else Singularity.ALGEBRAIC_AT_ZERO,
                         singularity_exponent=0.0 if smooth else min(n.real - 2.0, 0.0))
    r = integrate_semi_infinite(spec, tol)
    return complex(r.value), r.error_estimate


def _gamma(x: complex) -> complex:
    return complex(sps.gamma(x)) if complex(x).imag else float(sps.gamma(complex(x).real))


def eta_p_integral(params, n, tol: float = 1e-12) -> ZetaValue:
    """eta_p(n) = (2 pi)^n / Gamma(n) * int_0^inf z^{n-1} K(z) dz, Re(n) > 1."""
    params = as_params(params)
    n = complex(n)
    moment, err = kernel_moment(params, n, tol)
    factor = TWO_PI ** n / _gamma(n)
    return ZetaValue(n, factor * moment, "integral_rep", _positive(abs(factor) * err), params.p)


def zeta_p_via_functional_eq(params, m: int, tol: float = 1e-12) -> ZetaValue:
    """zeta_p(-2m-1) = 2 (-1)^{m+1} Gamma(2m+2) (2 pi)^{-(2m+2)} eta_p(2m+2), m >= 1.

    The product Gamma(s) (2 pi)^{-s} eta_p(s) is the kernel moment itself,
    so it is used directly.
    """
    params = as_params(params)
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")
    s = 2 * m + 2
    moment, err = kernel_moment(params, s, tol)
    sign = -1.0 if (m + 1) % 2 else 1.0
    value = 2.0 * sign * moment
    return ZetaValue(complex(-2 * m - 1), value, "functional_eq", _positive(2.0 * err), params.p)


def eta_from_zeta_negative(zeta_value: complex, m: int) -> complex:
    """Invert the reflection: eta_p(2m+2) from zeta_p(-2m-1)."""
    s = 2 * m + 2
    c = 2.0 * math.cos(PI * s / 2) * math.gamma(s) / TWO_PI ** s
    return zeta_value / c


__all__ = [
    "ZetaValue", "zeta_p_series", "coeff_s_nu_k", "coeff_asymptotic", "eta_p_series", "eta_p_integral",
    "zeta_p_via_functional_eq", "eta_from_zeta_negative", "kernel_moment", "hurwitz_zeta", "riemann_zeta",
]
