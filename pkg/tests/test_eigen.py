import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from koshsum.eigen import (EigenTable, Params, eigen_table, lambda_continuous, solve_lambda, weight,
                           weight_derivative)
from koshsum.errors import BracketFailure

# plain 120-step bisection of x cos(pi x) + sin(pi x) on (1/2, 1) in 30-digit mpmath
LAMBDA_1_P1 = 0.7876372941648639

# first-order slopes: lambda_n - n ~ -n/(pi p), lambda_n - (n - 1/2) ~ p/(pi (n - 1/2))
LARGE_P_SLOPE = 1.05 * 10 / math.pi
SMALL_P_SLOPE = 1.05 * 2 / math.pi


def g(p, x):
    return p * np.sin(np.pi * x) + x * np.cos(np.pi * x)


def test_params_rejects_non_positive():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            Params(bad)
    assert Params(2.0).weight_denom_shift == pytest.approx(2.0 * (2.0 + 1 / math.pi))


def test_lambda_1_regression():
    assert solve_lambda(1.0, 1) == pytest.approx(LAMBDA_1_P1, abs=1e-15)


def test_large_p_first_root_tends_to_one():
    lam = solve_lambda(1e8, 1)
    assert lam < 1.0 and abs(lam - 1.0) < 1e-7


def test_small_p_third_root_tends_to_half_integer():
    lam = solve_lambda(1e-8, 3)
    assert lam > 2.5 and abs(lam - 2.5) < 1e-7


def test_table_brackets_and_order():
    t = eigen_table(1.0, 5)
    n = np.arange(1, 6)
    assert t.count == 5
    assert np.all((t.lambdas > n - 0.5) & (t.lambdas < n))
    assert np.all(np.diff(t.lambdas) > 0)


def test_table_small_and_large_p():
    small = eigen_table(0.001, 3).lambdas
    large = eigen_table(1000.0, 3).lambdas
    n = np.arange(1, 4)
    assert np.all(np.abs(small - (n - 0.5)) < 1e-3)
    assert np.all(np.abs(large - n) < 1e-2)


def test_table_json_round_trip():
    t = eigen_table(0.3, 7)
    back = EigenTable.from_json(t.to_json())
    assert back.p == t.p
    np.testing.assert_array_equal(back.lambdas, t.lambdas)
    np.testing.assert_array_equal(back.residuals, t.residuals)


def test_table_is_read_only():
    t = eigen_table(1.0, 3)
    with pytest.raises(ValueError):
        t.lambdas[0] = 0.0


def test_bracket_failure_for_non_positive_p():
    from koshsum.eigen import _solve_many

    with pytest.raises(BracketFailure):
        _solve_many(-1.0, np.array([1.0, 2.0]), 1e-13)


def test_weight_examples():
    assert weight(1.0, 1e8) > 1 - 1e-15
    assert weight(1.0, 0.0) == pytest.approx(1 / (1 + 1 / math.pi), rel=1e-15)
    assert weight(2.0, 1.0) == pytest.approx(5 / (2 * (2 + 1 / math.pi) + 1), rel=1e-15)


def test_weight_derivative_matches_difference():
    x = np.linspace(0.1, 20, 50)
    h = 1e-6
    fd = (weight(0.7, x + h) - weight(0.7, x - h)) / (2 * h)
    np.testing.assert_allclose(weight_derivative(0.7, x), fd, rtol=1e-6, atol=1e-12)


def test_continuous_curve_hits_roots():
    t = eigen_table(2.5, 20)
    np.testing.assert_allclose(lambda_continuous(2.5, np.arange(1, 21)), t.lambdas, rtol=0, atol=1e-13)


def test_continuous_curve_slope_is_weight():
    k = np.array([3.2, 10.7])
    h = 1e-5
    slope = (lambda_continuous(0.4, k + h) - lambda_continuous(0.4, k - h)) / (2 * h)
    np.testing.assert_allclose(slope, weight(0.4, lambda_continuous(0.4, k)), rtol=1e-8)


p_values = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(p=p_values, n_max=st.integers(min_value=1, max_value=60))
def test_roots_certified(p, n_max):
    t = eigen_table(p, n_max)
    n = np.arange(1, n_max + 1)
    assert np.all((t.lambdas > n - 0.5) & (t.lambdas < n))
    assert np.all(np.diff(t.lambdas) > 0)
    # (-1)^n g(lambda) written with d = lambda - n, so pi*lambda is never rounded
    d = t.lambdas - n
    assert np.all(np.abs(p * np.sin(np.pi * d) + t.lambdas * np.cos(np.pi * d)) <= 1e-12 * (1 + p))


@settings(max_examples=40, deadline=None)
@given(p=st.floats(min_value=1e-3, max_value=1e3))
def test_tangent_form(p):
    lam = eigen_table(p, 30).lambdas
    c = np.cos(np.pi * lam)
    ok = np.abs(c) > 1e-3
    resid = np.tan(np.pi * lam[ok]) + lam[ok] / p
    # the tangent form amplifies the root residual by 1/(p |cos|)
    scale = (1 + p) * 1e-12 / (p * np.abs(c[ok]))
    assert np.all(np.abs(resid) <= scale + 1e-12 * np.abs(lam[ok] / p))


@settings(max_examples=40, deadline=None)
@given(p=st.floats(min_value=1e-9, max_value=1e9), x=st.floats(min_value=0, max_value=1e6))
def test_weight_in_unit_interval(p, x):
    w = weight(p, x)
    assert 0 < w < 1 or (w == 1.0 and x * x > 1e15 * p)


@pytest.mark.parametrize("p", [100.0, 1e3, 1e5])
def test_large_p_degeneration(p):
    lam = eigen_table(p, 10).lambdas
    n = np.arange(1, 11)
    assert np.all(np.abs(lam - n) <= LARGE_P_SLOPE / p)


@pytest.mark.parametrize("p", [1e-2, 1e-4, 1e-6])
def test_small_p_degeneration(p):
    lam = eigen_table(p, 10).lambdas
    n = np.arange(1, 11)
    assert np.all(np.abs(lam - (n - 0.5)) <= SMALL_P_SLOPE * p)
