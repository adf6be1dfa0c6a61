#!/usr/bin/env python3
"""
Truncated-series engine and Gaussian moment integral tests
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from core.exceptions import ContractViolationError, DimensionMismatchError, DivergentIntegralError, SeriesCapacityError
from core.phase_space import fock_char
from core.poly_engine import (
    HERALD_VARIABLES,
    BivariatePoly,
    GaussianWeight2D,
    PolynomialSeries,
    TruncatedSeries,
    exp_series,
    extract_derivative,
    gaussian_moment_integral,
)


def _random_series(rng, caps):
    shape = tuple(c + 1 for c in caps)
    coeffs = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return TruncatedSeries(["x", "y", "z"][:len(caps)], caps, coeffs)


# =====================================================================
# SERIES
# =====================================================================

def test_exp_of_zero_is_one():
    series = exp_series([0.0, 0.0, 0.0], np.zeros((3, 3)), (2, 1, 3))
    expected = np.zeros((3, 2, 4))
    expected[0, 0, 0] = 1.0
    assert_allclose(series.coeffs, expected)


def test_cross_coefficient_of_two_variable_exponential():
    a, b = 0.7, -1.3
    quadratic = np.array([[0.0, 1.0], [1.0, 0.0]])
    series = exp_series([a, -b], quadratic, (1, 1))
    # exp(2st + a s - b t): coefficient of s t is 2 - a b
    assert series.coefficient((1, 1)) == pytest.approx(2.0 - a * b)


def test_single_off_diagonal_entry():
    quadratic = np.zeros((8, 8))
    quadratic[0, 1] = 0.37
    series = exp_series([0.0] * 8, quadratic, (1, 1, 0, 0, 0, 0, 0, 0), HERALD_VARIABLES)
    assert series.coefficient((1, 1, 0, 0, 0, 0, 0, 0)) == pytest.approx(0.37)


def test_multiplication_is_commutative_and_associative(rng):
    caps = (2, 1, 2)
    f, g, h = (_random_series(rng, caps) for _ in range(3))
    assert_allclose((f * g).coeffs, (g * f).coeffs, atol=1e-12)
    assert_allclose(((f * g) * h).coeffs, (f * (g * h)).coeffs, atol=1e-11)


def test_exponential_times_its_inverse_is_one(rng):
    caps = (3, 2, 2)
    linear = rng.normal(size=3)
    quadratic = rng.normal(size=(3, 3))
    product = exp_series(linear, quadratic, caps) * exp_series(-linear, -quadratic, caps)
    expected = TruncatedSeries.one(product.variables, caps).coeffs
    assert_allclose(product.coeffs, expected, atol=1e-12)


def test_series_addition_and_shape_checks(rng):
    f = _random_series(rng, (1, 2))
    assert_allclose((f + f).coeffs, 2 * f.coeffs)
    with pytest.raises(DimensionMismatchError):
        f * _random_series(rng, (2, 1))
    with pytest.raises(DimensionMismatchError):
        exp_series([0.0], np.zeros((2, 2)), (1, 1))


def test_capacity_limit():
    with pytest.raises(SeriesCapacityError):
        TruncatedSeries(HERALD_VARIABLES, (30,) * 8)


@pytest.mark.parametrize("orders", [(1, 1), (2, 0), (2, 1), (2, 2), (0, 3), (3, 2)])
def test_extracted_derivative_matches_direct_expansion(orders, rng):
    linear = rng.uniform(-0.8, 0.8, size=2)
    quadratic = rng.uniform(-0.8, 0.8, size=(2, 2))

    # sum_k g^k / k! with g = L.u + u^T Q u written as a polynomial in (x, y)
    quad = np.zeros((3, 3))
    quad[2, 0], quad[1, 1], quad[0, 2] = quadratic[0, 0], quadratic[0, 1] + quadratic[1, 0], quadratic[1, 1]
    g = BivariatePoly.linear(linear[0], linear[1]) + BivariatePoly(quad)
    total, power = BivariatePoly.constant(1.0), BivariatePoly.constant(1.0)
    for k in range(1, sum(orders) + 1):
        power = power * g
        total = total + power * (1.0 / math.factorial(k))
    a, b = orders
    expected = total.coeffs[a, b] * math.factorial(a) * math.factorial(b)

    exact = extract_derivative(exp_series(linear, quadratic, orders), orders).coeffs[0, 0]
    assert exact == pytest.approx(expected, rel=1e-12, abs=1e-12)


def _exponential(linear, quadratic):
    return lambda u: np.exp(u @ linear + u @ quadratic @ u)


def _central_difference(f, orders, h):
    """Central difference of total order <= 2 at u = 0"""
    active = [j for j, o in enumerate(orders) for _ in range(o)]
    size = len(orders)
    if not active:
        return f(np.zeros(size))
    if len(active) == 1:
        step = np.zeros(size)
        step[active[0]] = h
        return (f(step) - f(-step)) / (2 * h)
    first, second = np.zeros(size), np.zeros(size)
    first[active[0]] += h
    second[active[1]] += h
    return (f(first + second) - f(first - second) - f(second - first) + f(-first - second)) / (4 * h * h)


@pytest.mark.parametrize("orders", [
    (0, 0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 1),
    (2, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 2, 0, 0, 0, 0),
    (1, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 1, 0, 0),
    (0, 1, 0, 0, 0, 0, 1, 0),
])
def test_extracted_derivative_matches_finite_differences(orders, rng):
    linear = rng.uniform(-0.8, 0.8, 8)
    quadratic = rng.uniform(-0.4, 0.4, (8, 8))
    quadratic = 0.5 * (quadratic + quadratic.T)
    f = _exponential(linear, quadratic)
    h = 1e-3
    # one Richardson step removes the h^2 error term
    numeric = (4 * _central_difference(f, orders, h / 2) - _central_difference(f, orders, h)) / 3
    exact = extract_derivative(exp_series(linear, quadratic, orders, HERALD_VARIABLES), orders).coeffs[0, 0]
    assert exact.real == pytest.approx(numeric, rel=1e-6, abs=1e-9)
    assert abs(exact.imag) < 1e-12


@pytest.mark.parametrize("orders", [(2, 2, 2, 2, 2, 2, 2, 2), (1, 1, 2, 2, 0, 0, 1, 1), (2, 0, 1, 0, 0, 2, 0, 1)])
def test_polynomial_coefficients_match_pointwise_series(orders, rng):
    directions = rng.normal(size=(8, 2))
    quadratic = rng.uniform(-0.3, 0.3, (8, 8))
    quadratic = 0.5 * (quadratic + quadratic.T)
    linear = [BivariatePoly.linear(*row) for row in directions]
    series = exp_series(linear, quadratic, orders, HERALD_VARIABLES)
    assert isinstance(series, PolynomialSeries)
    # the box never grows beyond the derivative orders
    assert series.gaussian.coeffs.shape == tuple(o + 1 for o in orders)
    poly = extract_derivative(series, orders)
    assert poly.degree <= sum(orders)
    for tau, sigma in rng.uniform(-1.5, 1.5, size=(5, 2)):
        pointwise = exp_series(directions @ [tau, sigma], quadratic, orders, HERALD_VARIABLES)
        expected = extract_derivative(pointwise, orders).coeffs[0, 0]
        assert poly(tau, sigma) == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_polynomial_coefficient_index_checks():
    series = exp_series([BivariatePoly.linear(1.0, 0.0), 0.5], np.zeros((2, 2)), (1, 1))
    assert series.coefficient((0, 0)).coeffs[0, 0] == 1.0
    assert series.coefficient((1, 0))(2.0, 0.0) == pytest.approx(2.0)
    with pytest.raises(ContractViolationError):
        series.coefficient((2, 0))
    with pytest.raises(DimensionMismatchError):
        series.coefficient((1,))


def test_extract_requires_orders_equal_to_caps():
    series = exp_series([0.1, 0.2], np.zeros((2, 2)), (2, 2))
    with pytest.raises(ContractViolationError):
        extract_derivative(series, (1, 2))


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_fock_generating_form(n, rng):
    # chi_n = exp(-|L|^2/4) / (2^n n!) d^n_s d^n_t exp(2st + s(tau + i sigma) - t(tau - i sigma))
    linear = [BivariatePoly.linear(1.0, 1j), BivariatePoly.linear(-1.0, 1j)]
    quadratic = np.array([[0.0, 1.0], [1.0, 0.0]])
    series = exp_series(linear, quadratic, (n, n))
    poly = extract_derivative(series, (n, n), prefactor=1.0 / (2 ** n * math.factorial(n)))
    for tau, sigma in rng.uniform(-2, 2, size=(10, 2)):
        value = poly(tau, sigma) * math.exp(-(tau ** 2 + sigma ** 2) / 4)
        assert value == pytest.approx(fock_char(n, tau, sigma), abs=1e-10)


# =====================================================================
# POLYNOMIALS AND MOMENT INTEGRALS
# =====================================================================

def test_bivariate_poly_arithmetic():
    p = BivariatePoly.linear(2.0, -1.0, 0.5)
    q = BivariatePoly.linear(0.0, 3.0)
    assert p.degree == 1
    assert (p * q).degree == 2
    assert (p * q)(1.5, -0.5) == pytest.approx(p(1.5, -0.5) * q(1.5, -0.5))
    assert (p + q)(0.3, 0.7) == pytest.approx(p(0.3, 0.7) + q(0.3, 0.7))
    assert BivariatePoly.constant(4.0).is_constant()


def test_substitution_is_composition(rng):
    p = BivariatePoly(rng.normal(size=(3, 4)))
    matrix = rng.normal(size=(2, 2))
    substituted = p.substitute(matrix)
    for x, y in rng.normal(size=(5, 2)):
        tau, sigma = matrix @ np.array([x, y])
        assert substituted(x, y) == pytest.approx(p(tau, sigma), rel=1e-10, abs=1e-10)


def test_moment_integral_closed_forms():
    c = 0.8
    weight = GaussianWeight2D(c * np.eye(2))
    assert gaussian_moment_integral(BivariatePoly.constant(1.0), weight) == pytest.approx(1.0 / (2 * c))
    tau_squared = BivariatePoly(np.array([[0.0], [0.0], [1.0]]))
    assert gaussian_moment_integral(tau_squared, weight) == pytest.approx(1.0 / (4 * c ** 2))
    tau_sigma = BivariatePoly(np.array([[0.0, 0.0], [0.0, 1.0]]))
    assert gaussian_moment_integral(tau_sigma, weight) == pytest.approx(0.0, abs=1e-15)


def test_moment_integral_matches_quadrature(rng):
    Q = np.array([[0.9, 0.3], [0.3, 0.6]])
    weight = GaussianWeight2D(Q)
    poly = BivariatePoly(rng.uniform(-1, 1, size=(5, 5)))

    def integrand(sigma, tau):
        return (poly(tau, sigma) * weight.evaluate(tau, sigma)).real

    expected, _ = integrate.dblquad(integrand, -12, 12, -12, 12, epsabs=1e-12, epsrel=1e-10)
    assert gaussian_moment_integral(poly, weight).real == pytest.approx(expected / (2 * math.pi), rel=1e-7, abs=1e-9)


def test_moment_integral_rejects_non_positive_weight():
    with pytest.raises(DivergentIntegralError):
        gaussian_moment_integral(BivariatePoly.constant(1.0), GaussianWeight2D(np.diag([0.5, -0.1])))
