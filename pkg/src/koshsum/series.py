"""Summation helpers: compensated sums, Euler-Maclaurin tails, averaging.

The tails use the midpoint form of Euler-Maclaurin,

    sum_{k > N} F(k) = int_{N+1/2}^inf F + F'(N+1/2)/24 - 7 F'''(N+1/2)/5760 + ...

For sums over the roots lambda_k the summand is viewed as a smooth function
of the continuous index kappa, with dx/dkappa = weight(p, x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import lambda_continuous, weight


@dataclass(frozen=True)
class TailEstimate:
    value: complex
    error: float


def fsum_complex(values) -> complex:
    """Correctly rounded sum of real and imaginary parts separately."""
    a = np.asarray(values)
    if not np.iscomplexobj(a):
        return complex(math.fsum(a.ravel().tolist()))
    a = a.ravel()
    return complex(math.fsum(a.real.tolist()), math.fsum(a.imag.tolist()))


def fsum_rows(values: np.ndarray) -> np.ndarray:
    """fsum along the last axis of a 2-D real or complex array."""
    a = np.asarray(values)
    if np.iscomplexobj(a):
        re = [math.fsum(r) for r in a.real.tolist()]
        im = [math.fsum(r) for r in a.imag.tolist()]
        return np.array(re) + 1j * np.array(im)
    return np.array([math.fsum(r) for r in a.tolist()])


def midpoint_tail(integral, d1, d3) -> TailEstimate:
    """Combine an integral and derivative samples into a tail estimate."""
    corr3 = 7.0 * d3 / 5760.0
    value = integral + d1 / 24.0 - corr3
    return TailEstimate(complex(value), float(abs(corr3)))


def node_tail(params, n_terms: int, dg, integral) -> TailEstimate:
    """Tail sum_{k > N} g(lambda_k) over the roots.

    Parameters
    ----------
    params : Params or float
    n_terms : int
        N, the number of roots already summed directly.
    dg : callable
        Derivative of the summand as a function of x (vectorized).
    integral : complex
        int_{x(N+1/2)}^inf g(x)/weight(p, x) dx, supplied by the caller.
    """
    kap = np.array([n_terms - 0.5, n_terms + 0.5, n_terms + 1.5])
    x = lambda_continuous(params, kap)
    f1 = weight(params, x) * dg(x)
    d3 = f1[2] - 2.0 * f1[1] + f1[0]
    return midpoint_tail(integral, f1[1], d3)


def integer_tail(n_terms: int, dphi, integral, scale: float = 1.0, shift: float = 0.0) -> TailEstimate:
    """Tail sum_{n > N} phi(scale*n + shift) given int_{scale*(N+1/2)+shift}^inf phi.

    ``integral`` is the x-integral; the Jacobian 1/scale is applied here.
    """
    kap = np.array([n_terms - 0.5, n_terms + 0.5, n_terms + 1.5])
    f1 = scale * np.asarray(dphi(scale * kap + shift))
    d3 = f1[2] - 2.0 * f1[1] + f1[0]
    return midpoint_tail(integral / scale, f1[1], d3)


def averaged_partial_sums(terms, levels: int = 12) -> TailEstimate:
    """Limit of an alternating series by repeated averaging of partial sums.

    The last ``levels + 1`` partial sums are averaged pairwise ``levels``
    times (an Euler transform of the tail).  The error estimate is the
    difference between the last two levels.
    """
    t = np.asarray(terms)
    if t.size < levels + 2:
        raise ValueError("need more terms than averaging levels")
    head = fsum_complex(t[: t.size - levels - 1])
    s = head + np.cumsum(t[t.size - levels - 1:])
    for _ in range(levels - 1):
        s = 0.5 * (s[:-1] + s[1:])
    val = complex(0.5 * (s[0] + s[1]))
    return TailEstimate(val, float(abs(val - s[0])))
