"""Preset analytic test functions with growth metadata and oracle values.

Each preset records
  * growth_bound gamma with |f(x +- iy)| <= C exp(gamma*y) on Re z >= 0,
  * its decay along the positive reals (exponential rate or algebraic power),
  * closed forms used as independent oracles:
      integral   int_0^inf f
      sum_n0     sum_{n >= 0} f(n)
      sum_half   sum_{n >= 1} f(n - 1/2)
      sum_odd    sum_{n >= 0} f(2n + 1)
      alt_half   f(0)/2 + sum_{n >= 1} (-1)^n f(n)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import scipy.special as sps

from .errors import DivergesAtZero, HypothesisViolation, UnknownPreset


def _fmt(v) -> str:
    if isinstance(v, complex) or np.iscomplexobj(v):
        v = complex(v)
        if v.imag != 0:
            return repr(v).strip("()")
        v = v.real
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


@dataclass(frozen=True)
class AnalyticFunction:
    """A vectorized analytic function plus hypothesis metadata.

    Attributes
    ----------
    name : str
        Preset family name.
    eval : callable
        complex -> complex, vectorized over numpy arrays.
    deriv : callable or None
        The derivative, vectorized.
    growth_bound : float
        gamma such that |f(x +- iy)| <= C exp(gamma*y).
    decay_rate : float
        Exponential decay rate along the positive reals; 0 for algebraic decay.
    power_decay : float or None
        k with |f(x)| ~ x**-k when decay is algebraic.
    x_integrable : bool
    closed_forms : mapping
        Named oracle values (see module docstring).
    analytic_at_origin : bool
        False for presets with a branch point at 0.
    params : tuple of (name, value)
    laplace_density : callable or None
        f1 with f(x) = int_0^inf exp(-x*y) f1(y) dy, when known.
    origin_value : complex or None
        f(0) for presets with a branch point at 0 (None if f(0) is infinite).
    origin_exponent : float
        a with f(x) ~ x**a as x -> 0+ (0 for analytic presets).
    """

    name: str
    eval: Callable
    deriv: Callable | None
    growth_bound: float
    decay_rate: float
    power_decay: float | None = None
    x_integrable: bool = True
    closed_forms: Mapping[str, complex] = field(default_factory=dict)
    analytic_at_origin: bool = True
    params: tuple = ()
    laplace_density: Callable | None = None
    label: str | None = None
    origin_value: complex | None = None
    origin_exponent: float = 0.0

    def __call__(self, z):
        return self.eval(z)

    @property
    def spec(self) -> str:
        """String form accepted by :func:`parse_preset`."""
        if self.label is not None:
            return self.label
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={_fmt(v)}" for k, v in self.params)

    def value_at_zero(self) -> complex:
        if self.analytic_at_origin:
            return complex(np.asarray(self.eval(np.array([0.0 + 0.0j])))[0])
        if self.origin_value is None:
            raise DivergesAtZero(f"{self.spec} is unbounded at 0")
        return complex(self.origin_value)

    def derivative_at_zero(self) -> complex | None:
        if self.deriv is None or not self.analytic_at_origin:
            return None
        return complex(self.deriv(np.array([0.0 + 0.0j]))[0])

    def scaled(self, k: float) -> "AnalyticFunction":
        """z -> f(k z) for k > 0, with metadata rescaled."""
        if not k > 0:
            raise ValueError("scale must be positive")
        f, d = self.eval, self.deriv
        return AnalyticFunction(
            name=self.name,
            eval=lambda z: f(k * np.asarray(z)),
            deriv=None if d is None else (lambda z: k * d(k * np.asarray(z))),
            growth_bound=k * self.growth_bound,
            decay_rate=k * self.decay_rate,
            power_decay=self.power_decay,
            x_integrable=self.x_integrable,
            closed_forms={},
            analytic_at_origin=self.analytic_at_origin,
            params=self.params,
            label=f"{self.spec}@x{_fmt(k)}",
            origin_value=self.origin_value,
            origin_exponent=self.origin_exponent,
        )


def require_growth(f: AnalyticFunction, threshold: float, formula_id: str,
                   allow_origin_singularity: bool = False) -> None:
    """Refuse functions outside a formula's hypothesis class.

    Raises
    ------
    HypothesisViolation
        If growth_bound >= threshold, or f is singular at 0 and that was not
        explicitly allowed.
    """
    if not f.growth_bound < threshold:
        raise HypothesisViolation(
            f"{formula_id}: {f.spec} has growth bound {f.growth_bound:g}, needs < {threshold:g}")
    if not f.analytic_at_origin and not allow_origin_singularity:
        raise HypothesisViolation(
            f"{formula_id}: {f.spec} is not analytic at 0; pass allow_origin_singularity=True")


def _exp(a: float = 1.0) -> AnalyticFunction:
    a = float(a)
    if not a > 0:
        raise UnknownPreset("exp needs a > 0")
    closed = {
        "integral": 1.0 / a,
        "sum_n0": -1.0 / math.expm1(-a),
        "sum_half": math.exp(-a / 2) / -math.expm1(-a),
        "sum_odd": 0.5 / math.sinh(a),
        "alt_half": 0.5 * math.tanh(a / 2),
    }
    return AnalyticFunction(
        "exp", lambda z: np.exp(-a * np.asarray(z)), lambda z: -a * np.exp(-a * np.asarray(z)),
        growth_bound=0.0, decay_rate=a, closed_forms=closed, params=(("a", a),))


def _rational(b: float = 1.0, c: float = 1.0) -> AnalyticFunction:
    b, c = float(b), float(c)
    if not (b > 0 and c >= 0):
        raise UnknownPreset("rational needs b > 0 and c >= 0")

    def f(z):
        u = np.asarray(z) + b
        return 1.0 / (u * u + c * c)

    def d(z):
        u = np.asarray(z) + b
        q = u * u + c * c
        return -2.0 * u / (q * q)

    if c > 0:
        closed = {
            "integral": (math.pi / 2 - math.atan(b / c)) / c,
            "sum_n0": complex(sps.digamma(complex(b, c))).imag / c,
        }
    else:
        closed = {"integral": 1.0 / b, "sum_n0": float(sps.polygamma(1, b))}
    return AnalyticFunction("rational", f, d, growth_bound=0.0, decay_rate=0.0, power_decay=2.0,
                            closed_forms=closed, params=(("b", b), ("c", c)))


def _expcos(a: float = 1.0, b: float = 0.5) -> AnalyticFunction:
    a, b = float(a), float(b)
    if not (a > 0 and b >= 0):
        raise UnknownPreset("expcos needs a > 0 and b >= 0")

    def f(z):
        z = np.asarray(z)
        return np.exp(-a * z) * np.cos(b * z)

    def d(z):
        z = np.asarray(z)
        return np.exp(-a * z) * (-a * np.cos(b * z) - b * np.sin(b * z))

    q = complex(a, -b)
    closed = {
        "integral": a / (a * a + b * b),
        "sum_n0": (1.0 / (1.0 - cmath.exp(-q))).real,
    }
    return AnalyticFunction("expcos", f, d, growth_bound=b, decay_rate=a, closed_forms=closed,
                            params=(("a", a), ("b", b)))


def _gammaker(w: complex = 2.0, z0: complex = 1.0) -> AnalyticFunction:
    w, z0 = complex(w), complex(z0)
    if not (w.real > 0 and z0.real > 0):
        raise UnknownPreset("gammaker needs Re(w) > 0 and Re(z0) > 0")

    def f(t):
        t = np.asarray(t, dtype=complex)
        return np.exp((w - 1.0) * np.log(t) - t * z0)

    def d(t):
        t = np.asarray(t, dtype=complex)
        return ((w - 1.0) / t - z0) * f(t)

    closed = {"integral": complex(sps.gamma(w)) * z0 ** (-w)}
    return AnalyticFunction("gammaker", f, d, growth_bound=abs(z0.imag), decay_rate=z0.real,
                            closed_forms=closed, analytic_at_origin=False,
                            params=(("w", w), ("z0", z0)),
                            origin_value=0j if w.real > 1 else None, origin_exponent=w.real - 1.0)


def _mellin_pair() -> AnalyticFunction:
    def f(z):
        u = 1.0 + np.asarray(z)
        return 1.0 / (u * u)

    def d(z):
        u = 1.0 + np.asarray(z)
        return -2.0 / (u * u * u)

    def f1(y):
        y = np.asarray(y)
        return y * np.exp(-y)

    return AnalyticFunction("mellin_pair", f, d, growth_bound=0.0, decay_rate=0.0, power_decay=2.0,
                            closed_forms={"integral": 1.0, "sum_n0": math.pi ** 2 / 6},
                            laplace_density=f1)


_PRESETS = {
    "exp": (_exp, ("a",)),
    "rational": (_rational, ("b", "c")),
    "expcos": (_expcos, ("a", "b")),
    "gammaker": (_gammaker, ("w", "z0")),
    "mellin_pair": (_mellin_pair, ()),
}


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def preset(name: str, **params) -> AnalyticFunction:
    """Build a preset by family name and keyword parameters.

    Raises
    ------
    UnknownPreset
        For an unknown family or parameter name.
    """
    key = name.strip().lower()
    if key not in _PRESETS:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(preset_names())}")
    factory, allowed = _PRESETS[key]
    extra = set(params) - set(allowed)
    if extra:
        raise UnknownPreset(f"preset {key!r} has no parameter(s) {', '.join(sorted(extra))}")
    return factory(**params)


def parse_preset(text: str) -> AnalyticFunction:
    """Parse ``"name:k=v,k=v"``, e.g. ``"exp:a=1.5"`` or ``"gammaker:w=2.5,z0=1+0.5j"``."""
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        k, sep, v = item.partition("=")
        if not sep:
            raise UnknownPreset(f"malformed preset parameter {item!r} in {text!r}")
        try:
            val = complex(v.strip().replace(" ", ""))
        except ValueError:
            raise UnknownPreset(f"non-numeric value {v!r} in {text!r}") from None
        params[k.strip()] = val.real if val.imag == 0 else val
    return preset(name, **params)


def derivative_defect(f: AnalyticFunction, points, h: float = 1e-5) -> float:
    """Max relative gap between f' metadata and central differences."""
    z = np.asarray(points, dtype=complex)
    fd = (f(z + h) - f(z - h)) / (2 * h)
    exact = f.deriv(z)
    return float(np.max(np.abs(fd - exact) / np.maximum(1.0, np.abs(exact))))


def cauchy_riemann_defect(f: AnalyticFunction, points, h: float = 1e-5) -> float:
    """Max relative violation of df/dx = -i df/dy, by central differences."""
    z = np.asarray(points, dtype=complex)
    dx = (f(z + h) - f(z - h)) / (2 * h)
    dy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return float(np.max(np.abs(dx + 1j * dy) / np.maximum(1.0, np.abs(dx))))


def estimate_growth(f: AnalyticFunction, x: float = 1.0, ys=(10.0, 20.0)) -> float:
    """Heuristic growth rate from |f| on a vertical line (both half planes)."""
    y0, y1 = ys
    rates = []
    for s in (1, -1):
        a = abs(complex(f(np.array([complex(x, s * y0)]))[0]))
        b = abs(complex(f(np.array([complex(x, s * y1)]))[0]))
        rates.append((math.log(b) - math.log(a)) / (y1 - y0))
    return max(rates)


__all__ = [
    "AnalyticFunction", "preset", "parse_preset", "preset_names", "require_growth",
    "derivative_defect", "cauchy_riemann_defect", "estimate_growth",
]
