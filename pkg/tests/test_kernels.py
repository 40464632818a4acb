import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from koshsum.eigen import eigen_table, shared_table
from koshsum.errors import DivergesAtZero, InsufficientTable, NearPole, PoleAtP
from koshsum.kernels import kernel_eval, kernel_K, kernel_K_partial_fraction, sigma, sigma_p

# sum_j w_j exp(-2 lambda_j) at p = 1 over 200 roots from an independent
# numpy bisection, accumulated in mpmath
SIGMA_P_1_2 = 0.2115662694838528


def test_sigma_examples():
    assert sigma(1.0, 0.0) == 1.0
    assert sigma(1.0, 1e12) == pytest.approx(-1.0, rel=1e-11)
    assert sigma(2.0, 1j) == pytest.approx((3 + 4j) / 5, rel=1e-15)


def test_sigma_pole():
    with pytest.raises(PoleAtP):
        sigma(1.5, 1.5)


@settings(max_examples=200, deadline=None)
@given(p=st.floats(min_value=1e-3, max_value=1e3),
       re=st.floats(min_value=-50, max_value=50), im=st.floats(min_value=-50, max_value=50))
def test_sigma_reflection(p, re, im):
    t = complex(re, im)
    if abs(t - p) < 1e-3 or abs(t + p) < 1e-3:
        return
    assert abs(sigma(p, -t) * sigma(p, t) - 1) < 1e-14


def test_sigma_reflection_thousand_points():
    rng = np.random.default_rng(7)
    t = rng.normal(size=1000) * 5 + 1j * rng.normal(size=1000) * 5
    p = 1.3
    t = t[(np.abs(t - p) > 1e-3) & (np.abs(t + p) > 1e-3)]
    assert np.max(np.abs(sigma(p, -t) * sigma(p, t) - 1)) < 1e-14


@pytest.mark.parametrize("p", [0.01, 1.0, 100.0])
def test_kernel_decays_on_the_real_axis(p):
    assert abs(kernel_K(p, 3.0)) < 2 * math.exp(-6 * math.pi)


def test_kernel_large_p_limit():
    assert kernel_K(1e8, 0.5) == pytest.approx(1 / math.expm1(math.pi), abs=1e-6)


@pytest.mark.parametrize("p", [0.05, 1.0, 20.0])
def test_kernel_definition_closure(p):
    x = np.linspace(0.01, 0.99 * p if p < 5 else 5.0, 40)
    s = sigma(p, x)
    closure = kernel_K(p, x) * (s * np.exp(2 * np.pi * x) - 1)
    assert np.max(np.abs(closure - 1)) < 1e-14 * 10


def test_near_pole_is_rejected():
    lam1 = eigen_table(1.0, 1).lambdas[0]
    with pytest.raises(NearPole):
        kernel_K(1.0, 1j * lam1 + 1e-10)
    with pytest.raises(NearPole):
        kernel_K(1.0, 0.0)


def test_kernel_eval_reports_distance():
    ev = kernel_eval(1.0, 0.5 + 0.8j)
    lam1 = eigen_table(1.0, 1).lambdas[0]
    assert ev.nearest_singularity_distance == pytest.approx(abs(0.5 + 0.8j - 1j * lam1))
    assert ev.value == pytest.approx(kernel_K(1.0, 0.5 + 0.8j))


@pytest.mark.parametrize("p,z,n", [(1.0, 0.7, 200), (1.0, 2 + 0.3j, 400)])
def test_partial_fraction_matches(p, z, n):
    pf = kernel_K_partial_fraction(p, z, eigen_table(p, n))
    assert abs(pf - kernel_K(p, z)) < 1e-8


@pytest.mark.parametrize("p", [0.01, 100.0])
def test_partial_fraction_extreme_p(p):
    pf = kernel_K_partial_fraction(p, 0.9, eigen_table(p, 200))
    assert abs(pf - kernel_K(p, 0.9)) < 1e-7


def test_partial_fraction_short_table():
    with pytest.raises(InsufficientTable):
        kernel_K_partial_fraction(1.0, 5.0, eigen_table(1.0, 10))


@pytest.mark.parametrize("p", [0.01, 0.1, 1.0, 10.0, 100.0])
def test_partial_fraction_grid(p):
    table = shared_table(p, 512)
    for re in (0.1, 0.5, 1.0, 2.5, 5.0):
        for im in (-2.0, -1.1, 0.0, 0.4, 2.0):
            z = complex(re, im)
            v, err = kernel_K_partial_fraction(p, z, table, with_error=True)
            assert abs(v - kernel_K(p, z)) <= max(err, 1e-13) + 1e-12


def test_sigma_p_large_z_is_leading_term():
    # lambda_1(1) < 0.79 so the value is ~6.6e-18, dominated by w_1 exp(-50 lambda_1)
    t = eigen_table(1.0, 3)
    lead = float(np.sum(t.weights * np.exp(-50.0 * t.lambdas)))
    assert sigma_p(1.0, 50.0) == pytest.approx(lead, rel=1e-13)
    assert sigma_p(1.0, 50.0) < 1e-17


def test_sigma_p_examples():
    assert sigma_p(1e8, 1.0) == pytest.approx(1 / (math.e - 1), abs=1e-6)
    assert sigma_p(1.0, 2.0) == pytest.approx(SIGMA_P_1_2, rel=1e-14)


def test_sigma_p_rejects_non_positive():
    with pytest.raises(DivergesAtZero):
        sigma_p(1.0, 0.0)


@pytest.mark.parametrize("p", [0.1, 1.0, 10.0])
def test_sigma_p_decreasing(p):
    z = np.geomspace(1e-3, 30, 80)
    assert np.all(np.diff(sigma_p(p, z)) < 0)


def test_sigma_p_small_z_uses_tail():
    # sum_j w_j e^{-lambda_j z} ~ 1/z for small z; the tail carries most of it
    v = sigma_p(1.0, 1e-3)
    assert 900 < v < 1100
