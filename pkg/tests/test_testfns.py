import cmath
import math

import numpy as np
import pytest
from scipy import integrate as sci

from koshsum.errors import HypothesisViolation, UnknownPreset
from koshsum.testfns import (cauchy_riemann_defect, derivative_defect, estimate_growth, parse_preset, preset,
                             preset_names, require_growth)

ALL = ["exp:a=1", "exp:a=2.5", "rational:b=1,c=1", "rational:b=2,c=0", "expcos:a=1,b=0.5",
       "gammaker:w=2.5,z0=1", "mellin_pair"]


def right_half_plane(n=100, seed=3):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.05, 5, n) + 1j * rng.uniform(-3, 3, n)


def test_examples():
    assert preset("exp", a=1).eval(1j * math.pi) == pytest.approx(-1.0, abs=1e-15)
    assert preset("rational", b=1, c=1).eval(0.0) == 0.5
    mp = preset("mellin_pair")
    assert mp.eval(0.0) == 1.0
    assert sci.quad(lambda x: mp.eval(x), 0, np.inf)[0] == pytest.approx(1.0, abs=1e-10)


def test_mellin_pair_is_a_laplace_transform():
    mp = preset("mellin_pair")
    for x in (0.0, 0.3, 2.0, 7.5):
        v, _ = sci.quad(lambda y: math.exp(-x * y) * mp.laplace_density(y), 0, np.inf, epsabs=1e-13)
        assert v == pytest.approx(mp.eval(x), rel=1e-10)


@pytest.mark.parametrize("spec", ALL)
def test_derivative_metadata(spec):
    f = parse_preset(spec)
    assert derivative_defect(f, right_half_plane()) < 1e-7


@pytest.mark.parametrize("spec", ALL)
def test_cauchy_riemann(spec):
    assert cauchy_riemann_defect(parse_preset(spec), right_half_plane()) < 1e-7


@pytest.mark.parametrize("spec", ["exp:a=1", "rational:b=1,c=1", "expcos:a=1,b=0.5", "expcos:a=1,b=2"])
def test_growth_metadata_spot_check(spec):
    f = parse_preset(spec)
    assert estimate_growth(f) <= f.growth_bound + 0.05


@pytest.mark.parametrize("spec", ["exp:a=1", "exp:a=0.3", "rational:b=2,c=1", "rational:b=1.5,c=0",
                                  "expcos:a=1,b=0.5", "mellin_pair"])
def test_closed_forms_against_brute_force(spec):
    f = parse_preset(spec)
    cf = f.closed_forms
    v, _ = sci.quad(lambda x: complex(f.eval(x)).real, 0, np.inf, epsabs=1e-13, limit=500)
    assert cf["integral"] == pytest.approx(v, rel=1e-9)
    n = np.arange(0, 200000, dtype=float)
    direct = math.fsum(np.real(f.eval(n)).tolist())
    tail = 0.0 if f.decay_rate > 0 else 1.0 / (n[-1] + 0.5)  # sum of x**-2 beyond the last node
    assert complex(cf["sum_n0"]).real == pytest.approx(direct + tail, rel=1e-9)


def test_exp_named_sums():
    cf = preset("exp", a=1.0).closed_forms
    k = np.arange(0, 200)
    assert cf["sum_half"] == pytest.approx(math.fsum(np.exp(-(k[1:] - 0.5))), rel=1e-14)
    assert cf["sum_odd"] == pytest.approx(math.fsum(np.exp(-(2 * k + 1))), rel=1e-14)
    alt = 0.5 + math.fsum(((-1.0) ** k[1:]) * np.exp(-k[1:]))
    assert cf["alt_half"] == pytest.approx(alt, rel=1e-14)


def test_gammaker_integral():
    f = preset("gammaker", w=2.5, z0=1 + 0.5j)
    v = sci.quad(lambda t: complex(f.eval(t)).real, 0, np.inf)[0] + 1j * sci.quad(
        lambda t: complex(f.eval(t)).imag, 0, np.inf)[0]
    assert abs(v - f.closed_forms["integral"]) < 1e-9
    assert not f.analytic_at_origin


def test_parse_round_trip():
    for spec in ALL:
        f = parse_preset(spec)
        assert parse_preset(f.spec).spec == f.spec


def test_unknown_presets():
    with pytest.raises(UnknownPreset):
        preset("sinc")
    with pytest.raises(UnknownPreset):
        parse_preset("exp:q=1")
    with pytest.raises(UnknownPreset):
        parse_preset("exp:a")
    with pytest.raises(UnknownPreset):
        parse_preset("exp:a=-1")
    assert preset_names() == sorted(preset_names())


def test_growth_gate():
    require_growth(preset("expcos", a=1, b=1), 2 * math.pi, "theorem4")
    with pytest.raises(HypothesisViolation):
        require_growth(preset("expcos", a=1, b=2), math.pi / 2, "entry4")
    with pytest.raises(HypothesisViolation):
        require_growth(preset("gammaker", w=2, z0=1), 2 * math.pi, "theorem4")
    require_growth(preset("gammaker", w=2, z0=1), 2 * math.pi, "theorem4", allow_origin_singularity=True)


def test_scaled_copy():
    f = preset("expcos", a=1, b=0.5)
    g = f.scaled(2.0)
    z = np.array([0.3 + 0.1j, 2.0])
    np.testing.assert_allclose(g.eval(z), f.eval(2 * z))
    np.testing.assert_allclose(g.deriv(z), 2 * f.deriv(2 * z))
    assert g.growth_bound == 1.0 and g.decay_rate == 2.0
    assert cmath.isclose(g.value_at_zero(), 1.0)
