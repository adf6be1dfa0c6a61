"""
Truncated multivariate power series and Gaussian moment integration.

The heralding operator is a product of high-order derivatives at u = 0 of a
quadratic exponential.  Rather than differentiate symbolically, the
exponential is expanded as a dense Taylor array truncated at the derivative
orders, and the single coefficient at the order multi-index is read off.

When the caller needs the result as a function of a 2D slice (tau, sigma) of
Lambda, the linear part of the exponent is a BivariatePoly per variable.  The
box then holds only the quadratic part, and the coefficient read off is a
BivariatePoly built by contracting that box against the powers of the
linear terms.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve2d
from scipy.special import gamma

from core.config import settings
from core.exceptions import (
    ContractViolationError,
    DimensionMismatchError,
    DivergentIntegralError,
    SeriesCapacityError,
)

logger = logging.getLogger(__name__)

HERALD_VARIABLES = ("u1", "v1", "u2", "v2", "u1'", "v1'", "u2'", "v2'")


# =====================================================================
# BIVARIATE POLYNOMIALS
# =====================================================================

@dataclass(frozen=True)
class BivariatePoly:
    """sum_ab c[a, b] tau^a sigma^b with complex coefficients"""
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim == 0:
            coeffs = coeffs.reshape(1, 1)
        if coeffs.ndim != 2:
            raise DimensionMismatchError(f"Bivariate coefficients must be 2D, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def constant(cls, value: complex) -> "BivariatePoly":
        return cls(np.array([[value]], dtype=complex))

    @classmethod
    def linear(cls, tau_coeff: complex, sigma_coeff: complex, const: complex = 0.0) -> "BivariatePoly":
        coeffs = np.zeros((2, 2), dtype=complex)
        coeffs[0, 0], coeffs[1, 0], coeffs[0, 1] = const, tau_coeff, sigma_coeff
        return cls(coeffs)

    @property
    def degree(self) -> int:
        """Total degree (0 for the zero polynomial)"""
        rows, cols = np.nonzero(self.coeffs)
        return int((rows + cols).max()) if rows.size else 0

    def is_constant(self) -> bool:
        return not np.any(self.coeffs.ravel()[1:])

    def terms(self) -> Iterable[Tuple[int, int, complex]]:
        for a, b in zip(*np.nonzero(self.coeffs)):
            yield int(a), int(b), complex(self.coeffs[a, b])

    def evaluate(self, tau, sigma):
        return npoly.polyval2d(tau, sigma, self.coeffs)

    def __call__(self, tau, sigma):
        return self.evaluate(tau, sigma)

    def __add__(self, other: "BivariatePoly") -> "BivariatePoly":
        rows = max(self.coeffs.shape[0], other.coeffs.shape[0])
        cols = max(self.coeffs.shape[1], other.coeffs.shape[1])
        total = np.zeros((rows, cols), dtype=complex)
        total[:self.coeffs.shape[0], :self.coeffs.shape[1]] += self.coeffs
        total[:other.coeffs.shape[0], :other.coeffs.shape[1]] += other.coeffs
        return BivariatePoly(total)

    def __mul__(self, other: Union["BivariatePoly", complex]) -> "BivariatePoly":
        if isinstance(other, BivariatePoly):
            return BivariatePoly(convolve2d(self.coeffs, other.coeffs))
        return BivariatePoly(self.coeffs * other)

    __rmul__ = __mul__

    def substitute(self, matrix: np.ndarray) -> "BivariatePoly":
        """Polynomial in (x, y) after tau = R00 x + R01 y, sigma = R10 x + R11 y"""
        matrix = np.asarray(matrix)
        tau = BivariatePoly.linear(matrix[0, 0], matrix[0, 1])
        sigma = BivariatePoly.linear(matrix[1, 0], matrix[1, 1])
        rows, cols = self.coeffs.shape
        tau_powers = [BivariatePoly.constant(1.0)]
        for _ in range(1, rows):
            tau_powers.append(tau_powers[-1] * tau)
        sigma_powers = [BivariatePoly.constant(1.0)]
        for _ in range(1, cols):
            sigma_powers.append(sigma_powers[-1] * sigma)
        result = BivariatePoly.constant(0.0)
        for a, b, c in self.terms():
            result = result + (tau_powers[a] * sigma_powers[b]) * c
        return result


@dataclass(frozen=True)
class GaussianWeight2D:
    """exp[-(Q11 tau^2 + 2 Q12 tau sigma + Q22 sigma^2)]"""
    Q: np.ndarray

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        if Q.shape != (2, 2):
            raise DimensionMismatchError(f"Gaussian weight must be 2x2, got {Q.shape}")
        Q = 0.5 * (Q + Q.T)
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    def is_positive_definite(self) -> bool:
        return bool(np.linalg.eigvalsh(self.Q).min() > 0.0)

    def __add__(self, other: "GaussianWeight2D") -> "GaussianWeight2D":
        return GaussianWeight2D(self.Q + other.Q)

    def evaluate(self, tau, sigma):
        tau = np.asarray(tau, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        return np.exp(-(self.Q[0, 0] * tau ** 2 + 2 * self.Q[0, 1] * tau * sigma + self.Q[1, 1] * sigma ** 2))


def _even_moments(max_degree: int, c: float) -> np.ndarray:
    """int x^k exp(-c x^2) dx for k = 0..max_degree"""
    k = np.arange(max_degree + 1)
    moments = np.zeros(max_degree + 1)
    even = k % 2 == 0
    half = k[even] / 2.0
    moments[even] = gamma(half + 0.5) / c ** (half + 0.5)
    return moments


def gaussian_moment_integral(poly: BivariatePoly, weight: GaussianWeight2D) -> complex:
    """(1/2 pi) int poly(tau, sigma) weight(tau, sigma) dtau dsigma, in closed form"""
    eigenvalues, vectors = np.linalg.eigh(weight.Q)
    if eigenvalues.min() <= 0.0:
        raise DivergentIntegralError(
            f"Gaussian weight is not positive definite (eigenvalues {eigenvalues.tolist()})"
        )

    if weight.Q[0, 1] == 0.0:
        rotated, (c1, c2) = poly, (weight.Q[0, 0], weight.Q[1, 1])
    else:
        # orthogonal change of variables, unit Jacobian
        rotated, (c1, c2) = poly.substitute(vectors), eigenvalues

    rows, cols = rotated.coeffs.shape
    moments_x = _even_moments(rows - 1, c1)
    moments_y = _even_moments(cols - 1, c2)
    return complex(moments_x @ rotated.coeffs @ moments_y) / (2.0 * math.pi)


# =====================================================================
# TRUNCATED SERIES
# =====================================================================

class TruncatedSeries:
    """
    Dense Taylor array over variables with per-variable degree caps.

    coeffs[i_1, ..., i_k] is the coefficient of prod x_j^{i_j}; every product
    drops indices beyond the caps.
    """

    def __init__(self, variables: Sequence[str], caps: Sequence[int], coeffs: Optional[np.ndarray] = None):
        if len(variables) != len(caps):
            raise DimensionMismatchError(f"{len(variables)} variables but {len(caps)} caps")
        if any(int(c) != c or c < 0 for c in caps):
            raise ContractViolationError(f"Caps must be non-negative integers, got {list(caps)}")
        self.variables = tuple(variables)
        self.caps = tuple(int(c) for c in caps)
        shape = tuple(c + 1 for c in self.caps)
        entries = int(np.prod(shape, dtype=np.int64))
        if entries > settings.MAX_SERIES_ENTRIES:
            raise SeriesCapacityError(
                f"Series over {self.variables} with caps {self.caps} needs {entries} entries "
                f"(limit {settings.MAX_SERIES_ENTRIES})"
            )
        if coeffs is None:
            coeffs = np.zeros(shape, dtype=complex)
        elif coeffs.shape != shape:
            raise DimensionMismatchError(f"Coefficient array {coeffs.shape} does not match caps {self.caps}")
        self.coeffs = coeffs

    @classmethod
    def one(cls, variables: Sequence[str], caps: Sequence[int]) -> "TruncatedSeries":
        series = cls(variables, caps)
        series.coeffs[(0,) * len(series.caps)] = 1.0
        return series

    def coefficient(self, index: Sequence[int]) -> complex:
        return complex(self.coeffs[tuple(index)])

    def fits(self, exponent: Sequence[int]) -> bool:
        return all(e <= c for e, c in zip(exponent, self.caps))

    def _shifted(self, exponent: Sequence[int]) -> np.ndarray:
        """Coefficients of x^exponent * self, truncated"""
        out = np.zeros_like(self.coeffs)
        target = tuple(slice(e, None) for e in exponent)
        source = tuple(slice(0, c + 1 - e) for e, c in zip(exponent, self.caps))
        out[target] = self.coeffs[source]
        return out

    def multiply_exp_monomial(self, coefficient: complex, exponent: Sequence[int]) -> "TruncatedSeries":
        """self * exp(coefficient * x^exponent), in place"""
        exponent = tuple(int(e) for e in exponent)
        if not any(exponent):
            self.coeffs = self.coeffs * np.exp(coefficient)
            return self
        if coefficient == 0 or not self.fits(exponent):
            return self
        total = self.coeffs.copy()
        term_coeff = 1.0 + 0j
        k = 1
        while self.fits([k * e for e in exponent]):
            term_coeff *= coefficient / k
            total += term_coeff * self._shifted([k * e for e in exponent])
            k += 1
        self.coeffs = total
        return self

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if self.variables != other.variables or self.caps != other.caps:
            raise DimensionMismatchError("Series multiplication needs identical variables and caps")
        product = np.zeros_like(self.coeffs)
        for index in zip(*np.nonzero(other.coeffs)):
            product += other.coeffs[index] * self._shifted(index)
        return TruncatedSeries(self.variables, self.caps, product)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if self.variables != other.variables or self.caps != other.caps:
            raise DimensionMismatchError("Series addition needs identical variables and caps")
        return TruncatedSeries(self.variables, self.caps, self.coeffs + other.coeffs)

    def __repr__(self) -> str:
        return f"TruncatedSeries(variables={self.variables}, caps={self.caps}, nonzero={np.count_nonzero(self.coeffs)})"


class PolynomialSeries:
    """
    exp(u^T L + u^T Q u) with every L_j a BivariatePoly in (tau, sigma).

    Held as the scalar series of the quadratic part times one factor
    exp(u_j L_j) per variable.  A coefficient is formed on request by
    contracting the capped box one variable at a time against the powers
    L_j^k / k!, so the (tau, sigma) degree only grows as axes are consumed.
    """

    def __init__(self, gaussian: TruncatedSeries, linear: Sequence[BivariatePoly]):
        if len(linear) != len(gaussian.caps):
            raise DimensionMismatchError(f"{len(linear)} linear terms for {len(gaussian.caps)} variables")
        self.gaussian = gaussian
        self.linear = tuple(linear)

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.gaussian.variables

    @property
    def caps(self) -> Tuple[int, ...]:
        return self.gaussian.caps

    def _powers(self, j: int, top: int) -> list:
        """Coefficient grids of L_j^k / k! for k = 0..top"""
        power = BivariatePoly.constant(1.0)
        powers = [power.coeffs]
        for k in range(1, top + 1):
            power = (power * self.linear[j]) * (1.0 / k)
            powers.append(power.coeffs)
        return powers

    def coefficient(self, index: Sequence[int]) -> BivariatePoly:
        index = tuple(int(i) for i in index)
        if len(index) != len(self.caps):
            raise DimensionMismatchError(f"Index {index} does not match {len(self.caps)} variables")
        if any(i < 0 for i in index) or not self.gaussian.fits(index):
            raise ContractViolationError(f"Index {index} lies outside the caps {self.caps}")

        # block[i] = gaussian[index - i]
        block = self.gaussian.coeffs[tuple(slice(i, None, -1) for i in index)]
        acc = block[..., np.newaxis, np.newaxis]
        for j, top in enumerate(index):
            powers = self._powers(j, top)
            rows, cols = acc.shape[-2:]
            out = np.zeros(acc.shape[1:-2] + (rows + max(p.shape[0] for p in powers) - 1,
                                              cols + max(p.shape[1] for p in powers) - 1), dtype=complex)
            for k, power in enumerate(powers):
                slab = acc[k]
                for a, b in zip(*np.nonzero(power)):
                    out[..., a:a + rows, b:b + cols] += power[a, b] * slab
            acc = out
        return BivariatePoly(acc)

    def __repr__(self) -> str:
        degrees = [entry.degree for entry in self.linear]
        return f"PolynomialSeries(variables={self.variables}, caps={self.caps}, linear degrees={degrees})"


LinearCoefficient = Union[complex, float, BivariatePoly]


def exp_series(linear: Sequence[LinearCoefficient], quadratic: np.ndarray, caps: Sequence[int],
               variables: Sequence[str] = None) -> Union[TruncatedSeries, PolynomialSeries]:
    """
    exp(u^T L + u^T Q u) truncated at caps.

    Scalar L gives a TruncatedSeries.  When any entry of L is a BivariatePoly
    in (tau, sigma) the result is a PolynomialSeries over the same caps.
    """
    caps = tuple(int(c) for c in caps)
    n = len(caps)
    variables = tuple(variables) if variables is not None else tuple(f"x{j}" for j in range(n))
    quadratic = np.asarray(quadratic, dtype=complex)
    if len(linear) != n or quadratic.shape != (n, n):
        raise DimensionMismatchError(
            f"exp_series got {len(linear)} linear terms and a {quadratic.shape} quadratic for {n} variables"
        )

    if any(isinstance(entry, BivariatePoly) for entry in linear):
        polys = [entry if isinstance(entry, BivariatePoly) else BivariatePoly.constant(entry) for entry in linear]
        series = PolynomialSeries(exp_series([0.0] * n, quadratic, caps, variables), polys)
        logger.debug(f"exp_series built: {series!r}")
        return series

    series = TruncatedSeries.one(variables, caps)
    for j in range(n):
        if caps[j] == 0:
            continue
        unit = [0] * n
        unit[j] = 1
        series.multiply_exp_monomial(complex(linear[j]), unit)

    for j in range(n):
        for k in range(j, n):
            weight = quadratic[j, k] if j == k else quadratic[j, k] + quadratic[k, j]
            if weight == 0:
                continue
            exponent = [0] * n
            exponent[j] += 1
            exponent[k] += 1
            series.multiply_exp_monomial(weight, exponent)

    logger.debug(f"exp_series built: {series!r}")
    return series


def extract_derivative(series: Union[TruncatedSeries, PolynomialSeries], orders: Sequence[int],
                       prefactor: complex = 1.0) -> BivariatePoly:
    """
    prefactor * prod(orders!) * coefficient at the multi-index `orders`,
    i.e. the mixed derivative at zero.  Orders must equal the series caps.
    """
    orders = tuple(int(o) for o in orders)
    if series.caps != orders:
        raise ContractViolationError(f"Derivative orders {orders} must equal the series caps {series.caps}")
    scale = prefactor * math.prod(math.factorial(o) for o in orders)
    if isinstance(series, PolynomialSeries):
        return series.coefficient(orders) * scale
    return BivariatePoly.constant(scale * series.coeffs[orders])
