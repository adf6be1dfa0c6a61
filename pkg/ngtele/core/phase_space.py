"""
Phase-space building blocks: symplectic transforms, Gaussian states and
closed-form Wigner characteristic functions.

Conventions
-----------
Natural units (hbar = 1), vacuum covariance I/2.  Quadratures are ordered
(q1, p1, q2, p2, ...); a characteristic-function argument Lambda uses the
matching order (tau1, sigma1, tau2, sigma2, ...), so the heralding matrices
(tau1, sigma1, tau2, sigma2) index straight into it.

    chi(Lambda) = Tr[rho exp(-i Lambda^T Omega xi)]
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import eval_laguerre

from core.config import settings
from core.exceptions import DimensionMismatchError, ParameterDomainError, SymplecticityError
from core.parameter_config import validate_kappa, validate_squeezing, validate_transmissivity

logger = logging.getLogger(__name__)

_OMEGA_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _frozen(array) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def symplectic_form(mode_count: int) -> np.ndarray:
    """Omega on n modes: block diagonal copies of [[0, 1], [-1, 0]]"""
    return np.kron(np.eye(mode_count), _OMEGA_BLOCK)


@dataclass(frozen=True)
class QuadratureIndexing:
    """Fixed (q1, p1, ..., qn, pn) ordering for an n-mode system"""
    mode_count: int

    def __post_init__(self):
        if self.mode_count < 1:
            raise DimensionMismatchError(f"mode_count must be positive, got {self.mode_count}")

    @property
    def dimension(self) -> int:
        return 2 * self.mode_count

    @property
    def omega(self) -> np.ndarray:
        return symplectic_form(self.mode_count)

    def q(self, mode: int) -> int:
        return 2 * mode

    def p(self, mode: int) -> int:
        return 2 * mode + 1

    def mode_slice(self, mode: int) -> slice:
        return slice(2 * mode, 2 * mode + 2)


@dataclass(frozen=True)
class ThermalSqueezeParams:
    """Two-mode squeezing r applied to two thermal modes with kappa = n_th + 1/2"""
    r: float
    kappa: float

    def __post_init__(self):
        object.__setattr__(self, "r", validate_squeezing(self.r))
        object.__setattr__(self, "kappa", validate_kappa(self.kappa))

    @classmethod
    def tmsv(cls, r: float) -> "ThermalSqueezeParams":
        return cls(r=r, kappa=0.5)

    @property
    def n_th(self) -> float:
        return self.kappa - 0.5

    @property
    def alpha(self) -> float:
        return math.sinh(self.r)

    @property
    def beta(self) -> float:
        return math.cosh(self.r)

    @property
    def gamma(self) -> float:
        return 4.0 * self.kappa * (self.alpha ** 2 + self.beta ** 2)

    @property
    def is_vacuum_seeded(self) -> bool:
        return self.kappa == 0.5


@dataclass(frozen=True)
class GaussianState:
    """Mean vector d and covariance matrix V of an n-mode Gaussian state"""
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean).reshape(-1)
        cov = _frozen(self.cov)
        if cov.shape != (mean.size, mean.size) or mean.size % 2:
            raise DimensionMismatchError(
                f"Mean of length {mean.size} does not fit covariance of shape {cov.shape}"
            )
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ParameterDomainError("Covariance matrix is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def mode_count(self) -> int:
        return self.mean.size // 2

    def is_physical(self, tolerance: float = None) -> bool:
        """V + (i/2) Omega must be positive semidefinite"""
        tolerance = settings.PHYSICALITY_TOLERANCE if tolerance is None else tolerance
        hermitian = self.cov + 0.5j * symplectic_form(self.mode_count)
        return bool(np.linalg.eigvalsh(hermitian).min() >= -tolerance)


@dataclass(frozen=True)
class SymplecticTransform:
    """Real 2n x 2n matrix S with S Omega S^T = Omega"""
    matrix: np.ndarray
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
            raise DimensionMismatchError(f"Symplectic matrix must be 2n x 2n, got {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)
        if self.check:
            defect = self.symplectic_defect()
            if defect >= settings.SYMPLECTIC_TOLERANCE:
                raise SymplecticityError(f"S Omega S^T deviates from Omega by {defect:.3e}")

    @property
    def mode_count(self) -> int:
        return self.matrix.shape[0] // 2

    def symplectic_defect(self) -> float:
        omega = symplectic_form(self.mode_count)
        return float(np.abs(self.matrix @ omega @ self.matrix.T - omega).max())

    def inverse(self) -> "SymplecticTransform":
        """S^-1 = Omega S^T Omega^T"""
        omega = symplectic_form(self.mode_count)
        return SymplecticTransform(omega @ self.matrix.T @ omega.T)

    def compose(self, other: "SymplecticTransform") -> "SymplecticTransform":
        """self after other"""
        return SymplecticTransform(self.matrix @ other.matrix)

    def apply(self, state: GaussianState) -> GaussianState:
        """d -> S d, V -> S V S^T"""
        if state.mode_count != self.mode_count:
            raise DimensionMismatchError(
                f"Transform on {self.mode_count} modes applied to {state.mode_count}-mode state"
            )
        return GaussianState(self.matrix @ state.mean, self.matrix @ state.cov @ self.matrix.T)


def _embed_two_mode(block: np.ndarray, i: int, j: int, mode_count: int) -> np.ndarray:
    if i == j or not (0 <= i < mode_count and 0 <= j < mode_count):
        raise DimensionMismatchError(f"Invalid mode pair ({i}, {j}) for {mode_count} modes")
    matrix = np.eye(2 * mode_count)
    index = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    matrix[np.ix_(index, index)] = block
    return matrix


def beam_splitter(T: float, i: int = 0, j: int = 1, mode_count: int = 2) -> SymplecticTransform:
    """B_ij(T): [xi_i, xi_j] -> [[sqrt(T), sqrt(1-T)], [-sqrt(1-T), sqrt(T)]] (x) I_2"""
    T = validate_transmissivity(T, allow_zero=True)
    t, rho = math.sqrt(T), math.sqrt(1.0 - T)
    block = np.kron(np.array([[t, rho], [-rho, t]]), np.eye(2))
    return SymplecticTransform(_embed_two_mode(block, i, j, mode_count))


def two_mode_squeezer(r: float, i: int = 0, j: int = 1, mode_count: int = 2) -> SymplecticTransform:
    """S_ij(r): blocks cosh(r) I_2 on the diagonal and sinh(r) Z off it, Z = diag(1, -1)"""
    if not math.isfinite(r):
        raise ParameterDomainError(f"Squeezing r={r} must be finite")
    z = np.diag([1.0, -1.0])
    block = np.block([
        [math.cosh(r) * np.eye(2), math.sinh(r) * z],
        [math.sinh(r) * z, math.cosh(r) * np.eye(2)],
    ])
    return SymplecticTransform(_embed_two_mode(block, i, j, mode_count))


# =====================================================================
# STATES
# =====================================================================

def vacuum(mode_count: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * mode_count), 0.5 * np.eye(2 * mode_count))


def thermal_state(kappa: float, mode_count: int = 1) -> GaussianState:
    """Uncorrelated thermal modes, V = kappa I"""
    validate_kappa(kappa)
    return GaussianState(np.zeros(2 * mode_count), kappa * np.eye(2 * mode_count))


def coherent_state(d_x: float, d_p: float) -> GaussianState:
    return GaussianState(np.array([d_x, d_p]), 0.5 * np.eye(2))


def squeezed_vacuum_state(epsilon: float) -> GaussianState:
    """q-squeezed vacuum, V = diag(exp(-2 eps), exp(2 eps)) / 2"""
    return GaussianState(np.zeros(2), 0.5 * np.diag([math.exp(-2 * epsilon), math.exp(2 * epsilon)]))


def tmst_state(params: ThermalSqueezeParams) -> GaussianState:
    """Zero mean, V = S(r) kappa I_4 S(r)^T"""
    squeezer = two_mode_squeezer(params.r)
    state = squeezer.apply(thermal_state(params.kappa, mode_count=2))
    logger.debug(f"TMST covariance built for r={params.r}, kappa={params.kappa}")
    return state


def direct_sum(*states: GaussianState) -> GaussianState:
    """Product state of independent Gaussian states, modes in argument order"""
    mean = np.concatenate([s.mean for s in states])
    size = mean.size
    cov = np.zeros((size, size))
    offset = 0
    for s in states:
        n = s.mean.size
        cov[offset:offset + n, offset:offset + n] = s.cov
        offset += n
    return GaussianState(mean, cov)


def partial_trace(state: GaussianState, keep_modes: Sequence[int]) -> GaussianState:
    """Reduced Gaussian state on keep_modes (select the mean/cov entries)"""
    index = [k for mode in keep_modes for k in (2 * mode, 2 * mode + 1)]
    if any(k >= state.mean.size for k in index):
        raise DimensionMismatchError(f"Modes {list(keep_modes)} not in a {state.mode_count}-mode state")
    return GaussianState(state.mean[index], state.cov[np.ix_(index, index)])


# =====================================================================
# CHARACTERISTIC FUNCTIONS
# =====================================================================

def gaussian_char(state: GaussianState, lam) -> np.ndarray:
    """exp[-1/2 Lambda^T (Omega V Omega^T) Lambda - i (Omega d)^T Lambda]; Lambda may be batched (..., 2n)"""
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] != state.mean.size:
        raise DimensionMismatchError(
            f"Lambda of length {lam.shape[-1]} does not match {state.mode_count} modes"
        )
    omega = symplectic_form(state.mode_count)
    kernel = omega @ state.cov @ omega.T
    quadratic = np.einsum("...i,ij,...j->...", lam, kernel, lam)
    linear = lam @ (omega @ state.mean)
    return np.exp(-0.5 * quadratic - 1j * linear)


def laguerre(n: int, x):
    """L_n(x), with the degree checked against the domain"""
    if n < 0:
        raise ParameterDomainError(f"Laguerre degree must be >= 0, got {n}")
    return eval_laguerre(n, np.asarray(x, dtype=float))


def fock_char(n: int, tau, sigma):
    """exp[-(tau^2+sigma^2)/4] L_n((tau^2+sigma^2)/2)"""
    radius2 = np.asarray(tau, dtype=float) ** 2 + np.asarray(sigma, dtype=float) ** 2
    return np.exp(-radius2 / 4.0) * laguerre(n, radius2 / 2.0)


def squeezed_vacuum_char(epsilon: float, tau, sigma):
    """exp[-(tau^2 e^{2 eps} + sigma^2 e^{-2 eps}) / 4]"""
    if not math.isfinite(epsilon):
        raise ParameterDomainError(f"Input squeezing {epsilon} must be finite")
    tau = np.asarray(tau, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return np.exp(-(tau ** 2 * math.exp(2 * epsilon) + sigma ** 2 * math.exp(-2 * epsilon)) / 4.0)


def coherent_char(d_x: float, d_p: float, tau, sigma):
    """exp[-(tau^2+sigma^2)/4 - i (tau d_p - sigma d_x)]"""
    tau = np.asarray(tau, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return np.exp(-(tau ** 2 + sigma ** 2) / 4.0 - 1j * (tau * d_p - sigma * d_x))


def vacuum_projection(state: GaussianState, measured_modes: Sequence[int]):
    """
    Condition on the vacuum outcome of measured_modes.

    Returns (conditional state on the remaining modes, outcome probability),
    with V_A|0 = V_AA - V_AF (V_FF + I/2)^-1 V_FA.
    """
    measured = sorted(measured_modes)
    kept = [mode for mode in range(state.mode_count) if mode not in measured]
    a_index = [k for mode in kept for k in (2 * mode, 2 * mode + 1)]
    f_index = [k for mode in measured for k in (2 * mode, 2 * mode + 1)]
    if len(f_index) + len(a_index) != state.mean.size or not kept:
        raise DimensionMismatchError(f"Cannot measure modes {measured} of a {state.mode_count}-mode state")

    v_aa = state.cov[np.ix_(a_index, a_index)]
    v_af = state.cov[np.ix_(a_index, f_index)]
    v_ff = state.cov[np.ix_(f_index, f_index)] + 0.5 * np.eye(len(f_index))
    d_a, d_f = state.mean[a_index], state.mean[f_index]

    gain = v_af @ np.linalg.inv(v_ff)
    conditional = GaussianState(d_a - gain @ d_f, v_aa - gain @ v_af.T)
    probability = math.exp(-0.5 * d_f @ np.linalg.solve(v_ff, d_f)) / math.sqrt(np.linalg.det(v_ff))
    return conditional, probability
