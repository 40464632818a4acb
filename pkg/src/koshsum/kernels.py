"""The Moebius map sigma, the kernel K and the weighted exponential sum.

K(z) = 1/(sigma(z) e^{2 pi z} - 1) with sigma(t) = (p + t)/(p - t).  Its
poles are z = 0 and z = +-i*lambda_j; it has the partial-fraction form

    K(z) = -1/2 + c0/z + (z/pi) sum_j w_j/(z^2 + lambda_j^2),
    c0 = (1/(2 pi)) / (1 + 1/(pi p)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import (EigenTable, as_params, lambda_continuous, shared_table, solve_lambda, weight,
                    weight_derivative)
from .errors import DivergesAtZero, InsufficientTable, NearPole, PoleAtP
from .series import fsum_complex, node_tail

PI = math.pi
TWO_PI = 2.0 * math.pi
POLE_RADIUS = 1e-8


def _scalar_or_array(out, like):
    return out.item() if np.ndim(like) == 0 else out


def sigma(params, t):
    """(p + t)/(p - t); satisfies sigma(-t) = 1/sigma(t).

    Raises
    ------
    PoleAtP
        If t coincides with p to within 1e-300 relative.
    """
    p = as_params(params).p
    t_arr = np.asarray(t)
    if np.any(np.abs(t_arr - p) <= 1e-300 * max(1.0, p)):
        raise PoleAtP(f"sigma evaluated at its pole t = p = {p!r}")
    return _scalar_or_array((p + t_arr) / (p - t_arr), t)


def kernel_values(p: float, z):
    """K(z) without pole checks; vectorized, overflow-free in both half planes.

    For Re z >= 0 the form (p - z) e^{-2 pi z} / ((p + z)(1 - e^{-2 pi z}) + 2z e^{-2 pi z})
    is used, otherwise (p - z)/((p + z)(e^{2 pi z} - 1) + 2z).  Both avoid
    cancellation near z = 0.
    """
    z = np.asarray(z)
    right = np.real(z) >= 0
    zr = np.where(right, z, 0)
    zl = np.where(right, 0, z)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        e = np.exp(-TWO_PI * zr)
        out_r = (p - zr) * e / (-(p + zr) * np.expm1(-TWO_PI * zr) + 2.0 * zr * e)
        out_l = (p - zl) / ((p + zl) * np.expm1(TWO_PI * zl) + 2.0 * zl)
    return np.where(right, out_r, out_l)


@dataclass(frozen=True)
class KernelEval:
    z: complex
    value: complex
    nearest_singularity_distance: float


def _nearest_singularity(p: float, z: complex):
    """Distance from z to the closest pole of K, and that pole."""
    best = (abs(z), 0j)
    y = abs(z.imag)
    if y > 0.25:
        sgn = 1.0 if z.imag >= 0 else -1.0
        for n in {max(1, math.floor(y)), max(1, math.ceil(y)), math.ceil(y) + 1}:
            lam = solve_lambda(p, n)
            pole = complex(0.0, sgn * lam)
            d = abs(z - pole)
            if d < best[0]:
                best = (d, pole)
    return best


def kernel_eval(params, z: complex) -> KernelEval:
    """K(z) together with the distance to the nearest pole.

    Raises
    ------
    NearPole
        If z is within 1e-8 of 0 or of +-i*lambda_j.
    """
    p = as_params(params).p
    z = complex(z)
    dist, pole = _nearest_singularity(p, z)
    if dist < POLE_RADIUS:
        raise NearPole(f"K evaluated within {dist:.3g} of its pole at {pole}", location=pole)
    return KernelEval(z, complex(kernel_values(p, z)), dist)


def kernel_K(params, z):
    """K(z) = 1/(sigma(z) e^{2 pi z} - 1) for scalar or array z.

    Raises
    ------
    NearPole
        If any z lies within 1e-8 of a pole (0 or +-i*lambda_j).
    """
    p = as_params(params).p
    z_arr = np.asarray(z)
    flat = z_arr.ravel()
    suspect = np.flatnonzero((np.abs(flat) < POLE_RADIUS) | (np.abs(np.real(flat)) < POLE_RADIUS))
    for i in suspect:
        zi = complex(flat[i])
        dist, pole = _nearest_singularity(p, zi)
        if dist < POLE_RADIUS:
            raise NearPole(f"K evaluated within {dist:.3g} of its pole at {pole}", location=pole)
    return _scalar_or_array(kernel_values(p, z_arr), z)


def kernel_K_partial_fraction(params, z, table: EigenTable | None = None, tail_tol: float = 1e-10,
                              with_error: bool = False):
    """K(z) from its partial-fraction expansion over the table's roots.

    Terms beyond the table are added as an Euler-Maclaurin tail; the tail's
    remainder estimate is the reported error.

    Parameters
    ----------
    params : Params or float
    z : complex
        Not 0 and not +-i*lambda_k.
    table : EigenTable, optional
        Defaults to a shared 512-root table.
    tail_tol : float
        Maximum admissible tail remainder.
    with_error : bool
        If true return (value, error_estimate).

    Raises
    ------
    InsufficientTable
        If the roots do not reach well past |z| or the tail remainder exceeds
        ``tail_tol``.
    """
    params = as_params(params)
    if table is None:
        table = shared_table(params, 512)
    z = complex(z)
    if z == 0:
        raise NearPole("partial fraction evaluated at z = 0", location=0j)
    lam = table.lambdas
    n = table.count
    if lam[-1] < 4.0 * abs(z) + 8.0:
        raise InsufficientTable(f"{n} roots do not extend far enough past |z|={abs(z):.3g}")
    z2 = z * z
    direct = fsum_complex(table.weights / (z2 + lam * lam))

    def dg(x):
        d = z2 + x * x
        return weight_derivative(params, x) / d - weight(params, x) * 2.0 * x / (d * d)

    edge = float(lambda_continuous(params, n + 0.5))
    integral = np.arctan(z / edge) / z
    tail = node_tail(params, n, dg, integral)
    if tail.error > tail_tol:
        raise InsufficientTable(f"tail remainder {tail.error:.3g} exceeds {tail_tol:.3g} with {n} roots")
    c0 = params.origin_factor / TWO_PI
    value = -0.5 + c0 / z + (z / PI) * (direct + tail.value)
    err = abs(z / PI) * tail.error
    return (value, err) if with_error else value


def sigma_p(params, z, table: EigenTable | None = None, tol: float = 1e-14):
    """sum_j w_j exp(-lambda_j z) for real z > 0 (scalar or array).

    Terms are summed directly while the geometric bound
    exp(-lambda_{N+1} z)/(1 - exp(-z)) exceeds ``tol``; if the table runs out
    first, the remainder is added as an Euler-Maclaurin tail.

    Raises
    ------
    DivergesAtZero
        If any z <= 0.
    """
    params = as_params(params)
    z_arr = np.asarray(z, dtype=float)
    if np.any(~(z_arr > 0)):
        raise DivergesAtZero("sigma_p requires z > 0")
    if table is None:
        table = shared_table(params, 256)
    flat = z_arr.ravel()
    zmin = float(flat.min())
    lam = table.lambdas
    with np.errstate(under="ignore"):
        bound = np.exp(-lam * zmin) / -np.expm1(-zmin)
    enough = np.flatnonzero(bound < tol)
    use_tail = enough.size == 0
    n = table.count if use_tail else int(enough[0]) + 1
    lam = lam[:n]
    w = table.weights[:n]
    with np.errstate(under="ignore"):
        terms = w[None, :] * np.exp(-np.outer(flat, lam))
    # summation order: ascending index per row
    out = terms.sum(axis=1) if flat.size > 64 else np.array([math.fsum(r) for r in terms.tolist()])
    if use_tail:
        big = float(lambda_continuous(params, n + 0.5))
        kap = np.array([n - 0.5, n + 0.5, n + 1.5])
        x = lambda_continuous(params, kap)
        wx = weight(params, x)
        wd = weight_derivative(params, x)
        with np.errstate(under="ignore"):
            e = np.exp(-np.outer(flat, x))
            f1 = wx[None, :] * (wd[None, :] - flat[:, None] * wx[None, :]) * e
            integral = np.exp(-big * flat) / flat
        d3 = f1[:, 2] - 2.0 * f1[:, 1] + f1[:, 0]
        out = out + integral + f1[:, 1] / 24.0 - 7.0 * d3 / 5760.0
    out = out.reshape(z_arr.shape)
    return float(out) if out.ndim == 0 else out
