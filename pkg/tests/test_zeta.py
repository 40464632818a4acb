import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sci

from koshsum.eigen import eigen_table
from koshsum.zeta import (coeff_asymptotic, coeff_s_nu_k, eta_from_zeta_negative, eta_p_integral, eta_p_series,
                          riemann_zeta, zeta_p_series, zeta_p_via_functional_eq)

PI = math.pi
# Richardson-combined brute-force sums over 1e5 / 2e5 / 4e5 roots from an
# independent numpy bisection; both combinations agree to all printed digits
ZETA_P_1_3 = 2.012569606422981
# scipy.integrate.quad at 1e-14 with a break at x = 2 pi
COEFF_2_2PI_1 = 0.5555990517796334
# 2 * int_0^inf z^3 K(z) dz at p = 1 by mpmath.quad at 30 digits
ZETA_P_1_NEG3 = 0.0022417698863043325
# the same mpmath route for (2 pi)^2 int_0^inf z K(z) dz
ETA_P_1_2 = 0.92531512070784416


def test_zeta_p_series_limits():
    assert zeta_p_series(1e8, 2).value == pytest.approx(PI ** 2 / 6, abs=1e-5)
    assert zeta_p_series(1e-8, 2).value == pytest.approx(PI ** 2 / 2, abs=1e-4)


def test_zeta_p_series_regression():
    v = zeta_p_series(1.0, 3)
    assert v.value == pytest.approx(ZETA_P_1_3, abs=1e-13)
    assert v.method == "series" and v.error_estimate > 0


def test_zeta_p_series_against_brute_force_with_table():
    t = eigen_table(0.5, 4096)
    direct = math.fsum((t.weights * t.lambdas ** -4.0).tolist())
    # remaining terms are below sum_{n > 4096} (n - 1/2)^-4 < 5e-12
    assert zeta_p_series(0.5, 4, table=t).value.real == pytest.approx(direct, abs=5e-12)


def test_zeta_p_series_domain():
    with pytest.raises(ValueError):
        zeta_p_series(1.0, 1.0)
    with pytest.raises(ValueError):
        zeta_p_series(1.0, 0.5 + 3j)


def test_coeff_regression_and_oracle():
    f = lambda x: math.exp(-x) * ((2 * PI - x) / (2 * PI + x)) * x
    a, _ = sci.quad(f, 0, 2 * PI, epsabs=1e-14, epsrel=1e-14)
    b, _ = sci.quad(f, 2 * PI, np.inf, epsabs=1e-14, epsrel=1e-14)
    assert coeff_s_nu_k(2, 2 * PI, 1) == pytest.approx(COEFF_2_2PI_1, abs=1e-14)
    assert coeff_s_nu_k(2, 2 * PI, 1) == pytest.approx(a + b, abs=1e-13)


def test_coeff_large_k_limit():
    assert abs(coeff_s_nu_k(2, 2 * PI, 10000) - (1 + 1 / PI) ** -2) < 1e-3
    # the asymptotic expansion is much sharper than the limit alone
    c0, c2, c4, c6 = coeff_asymptotic(2.0, 2 * PI)
    k = 50
    approx = c0 + c2 / k ** 2 + c4 / k ** 4 + c6 / k ** 6
    assert abs(coeff_s_nu_k(2, 2 * PI, k) - approx) < 1e-10


@settings(max_examples=40, deadline=None)
@given(s=st.floats(min_value=1.0, max_value=6.0), nu=st.floats(min_value=0.01, max_value=100.0),
       k=st.integers(min_value=1, max_value=100))
def test_coeff_bounded_by_one(s, nu, k):
    assert abs(coeff_s_nu_k(s, nu, k)) <= 1 + 1e-12


def test_coeff_algebraic_endpoint():
    # s = 1/2, integrand ~ x^{-1/2} at 0; compare with scipy's algebraic weight
    s, nu, k = 0.5, 3.0, 2
    f = lambda x: math.exp(-x) * ((k * nu - x) / (k * nu + x)) ** k
    a, _ = sci.quad(f, 0, k * nu, weight="alg", wvar=(-0.5, 0), epsabs=1e-13)
    b, _ = sci.quad(lambda x: f(x) * x ** -0.5, k * nu, np.inf, epsabs=1e-13)
    assert coeff_s_nu_k(s, nu, k) == pytest.approx((a + b) / math.gamma(0.5), abs=1e-11)


def test_eta_limits():
    assert eta_p_series(1e8, 2).value == pytest.approx(PI ** 2 / 6, abs=1e-4)
    assert eta_p_series(1e-6, 2).value == pytest.approx(-PI ** 2 / 12, abs=1e-3)
    assert eta_p_integral(1e8, 4).value == pytest.approx(PI ** 4 / 90, abs=1e-6)
    assert eta_p_integral(1e-6, 3).value == pytest.approx((2 ** -2 - 1) * riemann_zeta(3), abs=1e-5)


def test_eta_regression():
    assert eta_p_series(1.0, 2).value == pytest.approx(ETA_P_1_2, abs=1e-13)
    assert eta_p_integral(1.0, 2).value == pytest.approx(ETA_P_1_2, abs=1e-13)


@pytest.mark.parametrize("p", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("s", [2, 3, 4])
def test_eta_two_representations(p, s):
    a = eta_p_series(p, s)
    b = eta_p_integral(p, s)
    assert abs(a.value - b.value) < 1e-7
    assert abs(a.value - b.value) <= 10 * (a.error_estimate + b.error_estimate) + 1e-13


def test_eta_complex_argument():
    s = 2.5 + 1j
    assert abs(eta_p_series(1.0, s).value - eta_p_integral(1.0, s).value) < 1e-10


def test_eta_monotone_approach_to_zeta():
    gaps = [abs(eta_p_series(p, 2).value - PI ** 2 / 6) for p in (1.0, 10.0, 100.0, 1000.0)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_functional_equation_values():
    assert zeta_p_via_functional_eq(1e8, 1).value == pytest.approx(1 / 120, abs=1e-7)
    assert zeta_p_via_functional_eq(1e8, 2).value == pytest.approx(-1 / 252, abs=1e-6)
    assert zeta_p_via_functional_eq(1.0, 1).value == pytest.approx(ZETA_P_1_NEG3, abs=1e-13)
    # p -> 0: eta_p(4) -> (2^-3 - 1) zeta(4) gives zeta_p(-3) -> -7/960
    assert zeta_p_via_functional_eq(1e-6, 1).value == pytest.approx(-7 / 960, abs=1e-5)


@pytest.mark.parametrize("p", [0.3, 1.0, 4.0])
@pytest.mark.parametrize("m", [1, 2])
def test_functional_equation_round_trip(p, m):
    z = zeta_p_via_functional_eq(p, m).value
    assert abs(eta_from_zeta_negative(z, m) - eta_p_series(p, 2 * m + 2).value) < 1e-8


def test_functional_equation_rejects_m_zero():
    with pytest.raises(ValueError):
        zeta_p_via_functional_eq(1.0, 0)


def test_to_dict_shape():
    d = eta_p_series(1.0, 2.5 + 1j).to_dict()
    assert set(d) == {"s", "p", "method", "value", "error_estimate"}
    assert d["s"] == {"re": 2.5, "im": 1.0}
    assert isinstance(zeta_p_series(1.0, 2).to_dict()["value"], float)
