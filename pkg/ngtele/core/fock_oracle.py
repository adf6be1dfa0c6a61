"""
Truncated Fock-basis brute force for heralded TMST states.

Slow and independent of the phase-space algebra: states are density
matrices, beam splitters and the squeezer are matrix exponentials, and
characteristic functions are traces against displacement operators.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln, roots_hermite

from core.config import settings
from core.exceptions import CutoffError, DegenerateHeraldError, DimensionMismatchError
from core.herald import HeraldSpec
from core.phase_space import ThermalSqueezeParams
from core.teleport import TELEPORT_PROJECTION, InputState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FockOperatorSpace:
    """Single-mode ladder operators truncated at photon number cutoff"""
    cutoff: int

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def annihilation(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim)), k=1).astype(complex)

    @property
    def creation(self) -> np.ndarray:
        return self.annihilation.conj().T

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def fock(self, n: int) -> np.ndarray:
        if not 0 <= n <= self.cutoff:
            raise CutoffError(f"Fock state |{n}> outside cutoff {self.cutoff}")
        ket = np.zeros(self.dim, dtype=complex)
        ket[n] = 1.0
        return ket


@dataclass(frozen=True, eq=False)
class DensityMatrixNModes:
    modes: int
    cutoff: int
    matrix: np.ndarray

    def __post_init__(self):
        size = (self.cutoff + 1) ** self.modes
        if self.matrix.shape != (size, size):
            raise DimensionMismatchError(
                f"{self.modes}-mode density at cutoff {self.cutoff} needs shape {(size, size)}, got {self.matrix.shape}"
            )

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "DensityMatrixNModes":
        return DensityMatrixNModes(self.modes, self.cutoff, self.matrix / self.trace)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def is_hermitian(self, tolerance: float = 1e-10) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() < tolerance)

    def reshaped(self) -> np.ndarray:
        dim = self.cutoff + 1
        return self.matrix.reshape((dim,) * (2 * self.modes))


def thermal_populations(n_th: float, cutoff: int) -> np.ndarray:
    """p_n = n^n / (n + 1)^(n+1)"""
    n = np.arange(cutoff + 1)
    if n_th == 0:
        return (n == 0).astype(float)
    return np.exp(n * math.log(n_th) - (n + 1) * math.log1p(n_th))


@lru_cache(maxsize=8)
def tmst_density(params: ThermalSqueezeParams, cutoff: Optional[int] = None) -> DensityMatrixNModes:
    """S2(r) (rho_th x rho_th) S2(r)^dagger, squeezed in an enlarged space then truncated"""
    cutoff = settings.DEFAULT_CUTOFF if cutoff is None else cutoff
    big = FockOperatorSpace(cutoff + settings.ORACLE_MARGIN)
    a = np.kron(big.annihilation, big.identity)
    b = np.kron(big.identity, big.annihilation)
    squeezer = expm(params.r * (a.conj().T @ b.conj().T - a @ b))

    populations = thermal_populations(params.n_th, big.cutoff)
    rho_th = np.diag(np.kron(populations, populations)).astype(complex)
    rho = squeezer @ rho_th @ squeezer.conj().T

    keep = np.ix_(*[np.arange(cutoff + 1)] * 4)
    rho = rho.reshape((big.dim,) * 4)[keep].reshape((cutoff + 1) ** 2, (cutoff + 1) ** 2)
    deficiency = 1.0 - float(np.trace(rho).real)
    if deficiency > settings.ORACLE_TRACE_TOLERANCE:
        raise CutoffError(
            f"ORACLE TMST at r={params.r}, kappa={params.kappa} loses {deficiency:.3e} of its trace at cutoff {cutoff}"
        )
    logger.debug(f"ORACLE TMST density built at cutoff {cutoff}, trace deficiency {deficiency:.3e}")
    return DensityMatrixNModes(modes=2, cutoff=cutoff, matrix=rho)


def beam_splitter_unitary(T: float, cutoff: int) -> np.ndarray:
    """exp[theta (a^dag b - a b^dag)], theta = arccos sqrt(T), on modes (A, F)"""
    space = FockOperatorSpace(cutoff)
    a = np.kron(space.annihilation, space.identity)
    b = np.kron(space.identity, space.annihilation)
    theta = math.acos(math.sqrt(T))
    return expm(theta * (a.conj().T @ b - a @ b.conj().T))


@lru_cache(maxsize=32)
def herald_kraus(m: int, n: int, T: float, cutoff: int) -> np.ndarray:
    """<n|_F U(T) |m>_F acting on the first cutoff+1 levels of mode A"""
    local = cutoff + m + n
    dim = local + 1
    unitary = beam_splitter_unitary(T, local).reshape(dim, dim, dim, dim)
    # [k_A, n_F, j_A, m_F]
    return unitary[:cutoff + 1, n, :cutoff + 1, m]


def herald_oracle(spec: HeraldSpec, params: ThermalSqueezeParams,
                  cutoff: Optional[int] = None) -> Tuple[float, DensityMatrixNModes]:
    """Joint heralding probability and the normalized conditional two-mode state"""
    cutoff = settings.DEFAULT_CUTOFF if cutoff is None else cutoff
    rho = tmst_density(params, cutoff)
    kraus = np.kron(
        herald_kraus(spec.m1, spec.n1, spec.T1, cutoff),
        herald_kraus(spec.m2, spec.n2, spec.T2, cutoff),
    )
    heralded = kraus @ rho.matrix @ kraus.conj().T
    probability = float(np.trace(heralded).real)
    if probability < settings.ORACLE_PROBABILITY_FLOOR:
        raise DegenerateHeraldError(f"ORACLE herald {spec} has probability {probability:.3e}")
    logger.info(f"ORACLE herald {spec} r={params.r} kappa={params.kappa} cutoff={cutoff}: P={probability:.8g}")
    return probability, DensityMatrixNModes(modes=2, cutoff=cutoff, matrix=heralded / probability)


def displacement_matrix(alpha: complex, cutoff: int) -> np.ndarray:
    """<m|D(alpha)|n> of the untruncated operator, for m, n <= cutoff"""
    m = np.arange(cutoff + 1)[:, None]
    n = np.arange(cutoff + 1)[None, :]
    low, high = np.minimum(m, n), np.maximum(m, n)
    x = abs(alpha) ** 2
    magnitude = np.exp(0.5 * (gammaln(low + 1) - gammaln(high + 1)) - x / 2) * eval_genlaguerre(low, high - low, x)
    diff = m - n
    phase = np.where(diff >= 0, alpha ** np.maximum(diff, 0), (-np.conj(alpha)) ** np.maximum(-diff, 0))
    return magnitude * phase


def char_from_density(rho: DensityMatrixNModes, lam) -> complex:
    """Tr[rho D(alpha_1) x ... x D(alpha_n)] with alpha_k = (tau_k + i sigma_k) / sqrt(2)"""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (2 * rho.modes,):
        raise DimensionMismatchError(f"Lambda of shape {lam.shape} for a {rho.modes}-mode state")
    alphas = (lam[0::2] + 1j * lam[1::2]) / math.sqrt(2.0)
    displacements = [displacement_matrix(alpha, rho.cutoff) for alpha in alphas]
    if rho.modes == 1:
        return complex(np.einsum("ik,ki->", rho.matrix, displacements[0]))
    if rho.modes == 2:
        return complex(np.einsum("ijkl,ki,lj->", rho.reshaped(), *displacements, optimize=True))
    raise DimensionMismatchError(f"char_from_density handles one or two modes, got {rho.modes}")


def slice_variances(rho: DensityMatrixNModes) -> np.ndarray:
    """Var(p1 + p2) and Var(q1 - q2): the Gaussian decay of chi along tau and sigma on the teleportation slice"""
    if rho.modes != 2:
        raise DimensionMismatchError("Slice variances need a two-mode state")
    space = FockOperatorSpace(rho.cutoff)
    a = space.annihilation
    q = (a + a.conj().T) / math.sqrt(2.0)
    p = (a - a.conj().T) / (1j * math.sqrt(2.0))
    p_sum = np.kron(p, space.identity) + np.kron(space.identity, p)
    q_diff = np.kron(q, space.identity) - np.kron(space.identity, q)

    def variance(op):
        mean = np.trace(rho.matrix @ op)
        return float((np.trace(rho.matrix @ op @ op) - mean ** 2).real)

    return np.array([variance(p_sum), variance(q_diff)])


def oracle_fidelity(rho: DensityMatrixNModes, input_state: InputState, nodes: int = 48) -> float:
    """
    Gauss-Hermite evaluation of the BK fidelity integral with the oracle state.

    Nodes are scaled to the input weight plus the resource's own decay on the
    slice, so the remaining factor seen by the quadrature stays smooth.
    """
    if rho.modes != 2:
        raise DimensionMismatchError("Teleportation resource must have two modes")
    Q = input_state.weight.Q
    scales = np.sqrt(np.diag(Q) + 0.5 * slice_variances(rho))
    x, w = roots_hermite(nodes)
    total = 0.0
    for tau_node, tau_weight in zip(x, w):
        for sigma_node, sigma_weight in zip(x, w):
            tau, sigma = tau_node / scales[0], sigma_node / scales[1]
            lam = TELEPORT_PROJECTION @ np.array([tau, sigma])
            # input weight divided by the Hermite weight
            quadratic = Q[0, 0] * tau ** 2 + 2 * Q[0, 1] * tau * sigma + Q[1, 1] * sigma ** 2
            exponent = tau_node ** 2 + sigma_node ** 2 - quadratic
            total += tau_weight * sigma_weight * math.exp(exponent) * char_from_density(rho, lam).real
    value = total / (scales[0] * scales[1] * 2.0 * math.pi)
    logger.debug(f"ORACLE fidelity with {input_state.label} over {nodes}x{nodes} Hermite nodes: {value:.8g}")
    return value
