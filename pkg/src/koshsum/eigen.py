"""Roots of p*sin(pi*x) + x*cos(pi*x) = 0 and their node weights.

For every integer n >= 1 there is exactly one root lambda_n in (n - 1/2, n).
The solver works in the reduced variable u = lambda - (n - 1/2), where

    h(u) = p*cos(pi*u) - (n - 1/2 + u)*sin(pi*u),   u in (0, 1/2),

satisfies g(lambda) = (-1)**(n+1) * h(u).  h is strictly decreasing with the
exact endpoint values h(0) = p and h(1/2) = -n, so the bracket is certified
without any nudging of the endpoints.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketFailure

PI = math.pi
_EPS = np.finfo(float).eps
BISECTION_WIDTH = 1e-6
DEFAULT_TOL = 1e-13


@dataclass(frozen=True)
class Params:
    """The positive parameter p and derived constants.

    Attributes
    ----------
    p : float
        Strictly positive, finite.
    """

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (math.isfinite(p) and p > 0.0):
            raise ValueError(f"p must be a positive finite real, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def weight_denom_shift(self) -> float:
        """p*(p + 1/pi), the shift in the weight denominator."""
        return self.p * (self.p + 1.0 / PI)

    @property
    def origin_factor(self) -> float:
        """1/(1 + 1/(pi*p)); multiplies f(0) in the weighted formulas."""
        return PI * self.p / (PI * self.p + 1.0)


def as_params(p) -> Params:
    return p if isinstance(p, Params) else Params(p)


def _h(p, m, u):
    return p * np.cos(PI * u) - (m + u) * np.sin(PI * u)


def _dh(p, m, u):
    s = np.sin(PI * u)
    return -(PI * p + 1.0) * s - PI * (m + u) * np.cos(PI * u)


def _solve_many(p: float, n: np.ndarray, tol: float):
    """Solve for lambda_n at every index in ``n`` independently.

    Returns (lambdas, residuals, bounds) where residuals are signed values of
    p*sin(pi*x) + x*cos(pi*x) and bounds are the certification thresholds.
    """
    n = np.asarray(n, dtype=float)
    if not (p > 0.0 and math.isfinite(p)):
        raise BracketFailure(f"no sign change on the bracket for p={p!r}", index=int(n.flat[0]) if n.size else None)
    m = n - 0.5
    h_hi = _h(p, m, 0.5)
    bad = ~(h_hi < 0.0)
    if bad.any():
        raise BracketFailure("no sign change on the bracket", index=int(n[bad][0]))

    lo = np.zeros_like(m)
    hi = np.full_like(m, 0.5)
    for _ in range(math.ceil(math.log2(0.5 / BISECTION_WIDTH))):
        mid = 0.5 * (lo + hi)
        pos = _h(p, m, mid) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)

    # asymptotic initial guess; only used when it falls inside the bracket
    u = 0.5 - np.arctan(n / p) / PI
    u = np.where((u > lo) & (u < hi), u, 0.5 * (lo + hi))
    active = np.ones(u.shape, dtype=bool)
    for _ in range(60):
        hu = _h(p, m, u)
        lo = np.where(hu > 0.0, u, lo)
        hi = np.where(hu < 0.0, u, hi)
        step = hu / _dh(p, m, u)
        nxt = u - step
        outside = (nxt <= lo) | (nxt >= hi)
        nxt = np.where(outside, 0.5 * (lo + hi), nxt)
        done = np.abs(nxt - u) <= 0.25 * _EPS * (m + u)
        u = np.where(active, nxt, u)
        active &= ~done
        if not active.any():
            break

    lam = m + u
    # pick the best of the three nearest doubles
    cands = np.stack([np.nextafter(lam, -np.inf), lam, np.nextafter(lam, np.inf)])
    res = np.abs(_h(p, m, cands - m))
    lam = cands[np.argmin(res, axis=0), np.arange(lam.size)]
    u = lam - m
    h_val = _h(p, m, u)
    sign = np.where(n % 2 == 1, 1.0, -1.0)
    residuals = sign * h_val
    bounds = tol * (1.0 + p) + np.abs(_dh(p, m, u)) * np.spacing(lam)
    bad = ~(np.abs(residuals) <= bounds) | ~(lam > m) | ~(lam < n)
    if bad.any():
        raise BracketFailure("root failed certification", index=int(n[bad][0]))
    return lam, residuals, bounds


def solve_lambda(params, n: int, tol: float = DEFAULT_TOL) -> float:
    """Return lambda_n, the root of p*sin(pi*x) + x*cos(pi*x) in (n - 1/2, n).

    Parameters
    ----------
    params : Params or float
    n : int
        Index, n >= 1.
    tol : float
        Residual tolerance relative to (1 + p).  The certification threshold
        also admits the unavoidable rounding term |g'(lambda)| * ulp(lambda).

    Raises
    ------
    BracketFailure
        If the bracket shows no sign change or the root fails certification.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    params = as_params(params)
    lam, _, _ = _solve_many(params.p, np.array([float(n)]), tol)
    return float(lam[0])


def lambda_residual(params, lam):
    """p*sin(pi*x) + x*cos(pi*x), evaluated relative to the nearest bracket."""
    params = as_params(params)
    lam = np.asarray(lam, dtype=float)
    n = np.ceil(lam)
    m = n - 0.5
    sign = np.where(n % 2 == 1, 1.0, -1.0)
    return sign * _h(params.p, m, lam - m)


@dataclass(frozen=True, eq=False)
class EigenTable:
    """Certified roots lambda_1 .. lambda_N for one value of p.

    Attributes
    ----------
    p : float
    lambdas : numpy.ndarray
        Increasing roots, ``lambdas[n - 1]`` lies in (n - 1/2, n).
    residuals : numpy.ndarray
        Signed values of p*sin(pi*x) + x*cos(pi*x) at each root.
    """

    p: float
    lambdas: np.ndarray
    residuals: np.ndarray

    @property
    def count(self) -> int:
        return int(self.lambdas.size)

    @property
    def roots(self):
        return [(i + 1, float(x), float(r)) for i, (x, r) in enumerate(zip(self.lambdas, self.residuals))]

    @property
    def params(self) -> Params:
        return Params(self.p)

    @functools.cached_property
    def weights(self) -> np.ndarray:
        w = weight(self.p, self.lambdas)
        w.setflags(write=False)
        return w

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "roots": [{"n": n, "lambda": x, "residual": r} for n, x, r in self.roots],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "EigenTable":
        roots = sorted(data["roots"], key=lambda r: r["n"])
        if [r["n"] for r in roots] != list(range(1, len(roots) + 1)):
            raise ValueError("roots must be indexed 1..N without gaps")
        lam = np.array([r["lambda"] for r in roots], dtype=float)
        res = np.array([r["residual"] for r in roots], dtype=float)
        return cls(float(data["p"]), _frozen(lam), _frozen(res))

    @classmethod
    def from_json(cls, text: str) -> "EigenTable":
        return cls.from_dict(json.loads(text))

    def extended(self, n_max: int) -> "EigenTable":
        """A table with at least ``n_max`` roots (self if already long enough)."""
        if n_max <= self.count:
            return self
        return eigen_table(self.p, n_max)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def eigen_table(params, n_max: int, tol: float = DEFAULT_TOL) -> EigenTable:
    """Solve for lambda_1 .. lambda_{n_max}, each index independently.

    Raises
    ------
    BracketFailure
        Carrying the first offending index.
    """
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be a positive integer, got {n_max!r}")
    params = as_params(params)
    n = np.arange(1, int(n_max) + 1, dtype=float)
    lam, res, _ = _solve_many(params.p, n, tol)
    return EigenTable(params.p, _frozen(lam), _frozen(res))


@functools.lru_cache(maxsize=64)
def _cached(p: float, size: int) -> EigenTable:
    return eigen_table(p, size)


def shared_table(params, n_min: int) -> EigenTable:
    """A cached table with at least ``n_min`` roots (sizes rounded up to 2**k)."""
    params = as_params(params)
    size = 1 << max(6, math.ceil(math.log2(max(int(n_min), 1))))
    return _cached(params.p, size)


def weight(params, lam):
    """Node weight (p**2 + x**2)/(p*(p + 1/pi) + x**2), lies in (0, 1).

    Evaluated as 1 - (p/pi)/(p*(p + 1/pi) + x**2) to avoid cancellation.
    Accepts scalars or arrays.
    """
    params = as_params(params)
    lam = np.asarray(lam, dtype=float)
    out = 1.0 - (params.p / PI) / (params.weight_denom_shift + lam * lam)
    return float(out) if out.ndim == 0 else out


def weight_derivative(params, lam):
    """d/dx of the node weight."""
    params = as_params(params)
    lam = np.asarray(lam, dtype=float)
    d = params.weight_denom_shift + lam * lam
    out = (params.p / PI) * 2.0 * lam / (d * d)
    return float(out) if out.ndim == 0 else out


def lambda_continuous(params, kappa):
    """Continuous root curve x(kappa) with x(n) = lambda_n.

    Solves x = kappa - 1/2 + arctan(p/x)/pi for kappa >= 1/2.  Its derivative
    is dx/dkappa = weight(p, x), which is what turns node sums into integrals
    over x with density 1/weight.
    """
    params = as_params(params)
    p = params.p
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa < 0.5):
        raise ValueError("kappa must be >= 1/2")
    x = kappa.copy()
    for _ in range(100):
        g = x - kappa + 0.5 - np.arctan2(p, x) / PI
        dg = 1.0 + (p / PI) / (x * x + p * p)
        step = g / dg
        x = x - step
        if np.all(np.abs(step) <= 4 * _EPS * np.abs(x)):
            break
    return float(x) if x.ndim == 0 else x
