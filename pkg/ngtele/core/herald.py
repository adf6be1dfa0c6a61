"""
Heralded non-Gaussian TMST states.

Each TMST mode A_i meets an ancilla prepared in |m_i> on a beam splitter of
transmissivity T_i; the ancilla output is detected with n_i photons.  The
unnormalized characteristic function of the heralded state is

    chi~(Lambda) = (4/a0) F exp(Lambda^T M1 Lambda + u^T M2 Lambda + u^T M3 u)

where F takes derivatives of order (m1, m1, m2, m2, n1, n1, n2, n2) in
u = (u1, v1, u2, v2, u1', v1', u2', v2') at u = 0, scaled by
2^-(m1+m2+n1+n2) / (m1! m2! n1! n2!).  Lambda is (tau1, sigma1, tau2, sigma2).
"""

import logging
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from core.config import settings
from core.exceptions import (
    DegenerateHeraldError,
    DimensionMismatchError,
    InternalConsistencyError,
    ParameterDomainError,
)
from core.parameter_config import validate_photon_count, validate_transmissivity
from core.phase_space import ThermalSqueezeParams, beam_splitter, symplectic_form, tmst_state
from core.poly_engine import HERALD_VARIABLES, BivariatePoly, exp_series, extract_derivative

logger = logging.getLogger(__name__)

PS, PA, PC = "PS", "PA", "PC"

_TEMPLATE_LABEL = re.compile(r"^(sym|asym)-(\d+)(?:,(\d+))?-(PS|PA|PC)$")
_EXPLICIT_LABEL = re.compile(r"^(\d+),(\d+),(\d+),(\d+)$")


def _mode_counts(kind: str, k: int) -> Tuple[int, int]:
    """(m, n) for k photons of the given operation"""
    return {PS: (0, k), PA: (k, 0), PC: (k, k)}[kind]


def _classify(m: int, n: int) -> str:
    if m < n:
        return PS
    if m > n:
        return PA
    return PC


def _validate_herald_transmissivity(T: float, name: str) -> float:
    if T == 0:
        raise DegenerateHeraldError(f"{name}=0 (total reflection) is not supported")
    return validate_transmissivity(T)


# =====================================================================
# HERALD SPEC
# =====================================================================

@dataclass(frozen=True)
class HeraldSpec:
    """Ancilla photons m_i, detected photons n_i and transmissivities T_i per mode"""
    m1: int
    m2: int
    n1: int
    n2: int
    T1: float = 1.0
    T2: float = 1.0

    def __post_init__(self):
        for name in ("m1", "m2", "n1", "n2"):
            object.__setattr__(self, name, validate_photon_count(getattr(self, name), name))
        object.__setattr__(self, "T1", _validate_herald_transmissivity(self.T1, "T1"))
        object.__setattr__(self, "T2", _validate_herald_transmissivity(self.T2, "T2"))

    @classmethod
    def from_label(cls, label: str, T: float = 1.0) -> "HeraldSpec":
        """
        Parse 'sym-k-X', 'asym-k-X', 'asym-k,j-X' (X in PS, PA, PC) or an
        explicit 'm1,m2,n1,n2'; active modes get transmissivity T.
        """
        text = label.strip()
        explicit = _EXPLICIT_LABEL.match(text)
        if explicit:
            m1, m2, n1, n2 = (int(g) for g in explicit.groups())
            return cls(m1, m2, n1, n2).at(T)

        match = _TEMPLATE_LABEL.match(text)
        if not match:
            raise ParameterDomainError(f"Unknown herald label '{label}'")
        symmetry, first, second, kind = match.groups()
        first = int(first)
        if symmetry == "sym":
            if second is not None:
                raise ParameterDomainError(f"Symmetric label '{label}' takes a single photon count")
            mode2 = _mode_counts(kind, first)
        else:
            mode2 = _mode_counts(kind, int(second)) if second is not None else (0, 0)
        mode1 = _mode_counts(kind, first)
        return cls(mode1[0], mode2[0], mode1[1], mode2[1]).at(T)

    def at(self, T: float) -> "HeraldSpec":
        """Copy with transmissivity T on every active mode; idle modes stay at T=1"""
        return HeraldSpec(
            self.m1, self.m2, self.n1, self.n2,
            T1=T if self.mode_active(0) else 1.0,
            T2=T if self.mode_active(1) else 1.0,
        )

    def mode_active(self, mode: int) -> bool:
        m, n = (self.m1, self.n1) if mode == 0 else (self.m2, self.n2)
        return (m, n) != (0, 0)

    def operation_kinds(self) -> Tuple[str, str]:
        return _classify(self.m1, self.n1), _classify(self.m2, self.n2)

    @property
    def is_symmetric(self) -> bool:
        return (self.m1, self.n1, self.T1) == (self.m2, self.n2, self.T2)

    @property
    def is_asymmetric(self) -> bool:
        return self.mode_active(0) and not self.mode_active(1) and self.T2 == 1.0

    @property
    def is_catalysis(self) -> bool:
        return all(kind == PC for kind in self.operation_kinds())

    @property
    def label(self) -> str:
        def template(m, n):
            kind = _classify(m, n)
            if kind == PS and m == 0:
                return kind, n
            if kind == PA and n == 0:
                return kind, m
            if kind == PC and m > 0:
                return kind, m
            return None

        first, second = template(self.m1, self.n1), template(self.m2, self.n2)
        if first and not self.mode_active(1):
            return f"asym-{first[1]}-{first[0]}"
        if first and second and first[0] == second[0]:
            if first[1] == second[1]:
                return f"sym-{first[1]}-{first[0]}"
            return f"asym-{first[1]},{second[1]}-{first[0]}"
        return f"{self.m1},{self.m2},{self.n1},{self.n2}"

    @property
    def derivative_orders(self) -> Tuple[int, ...]:
        return (self.m1, self.m1, self.m2, self.m2, self.n1, self.n1, self.n2, self.n2)

    @property
    def operator_prefactor(self) -> float:
        total = self.m1 + self.m2 + self.n1 + self.n2
        factorials = math.prod(math.factorial(k) for k in (self.m1, self.m2, self.n1, self.n2))
        return 2.0 ** (-total) / factorials

    def __str__(self) -> str:
        return f"{self.label}(T1={self.T1:g}, T2={self.T2:g})"


# =====================================================================
# QUADRATIC FORMS
# =====================================================================

@dataclass(frozen=True, eq=False)
class QuadraticForms:
    """norm * exp(Lambda^T M1 Lambda + u^T M2 Lambda + u^T M3 u) with norm = 4/a0"""
    norm: float
    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray

    def __post_init__(self):
        shapes = {"M1": (4, 4), "M2": (8, 4), "M3": (8, 8)}
        for name, shape in shapes.items():
            matrix = np.array(getattr(self, name), dtype=complex if name == "M2" else float)
            if matrix.shape != shape:
                raise DimensionMismatchError(f"{name} must be {shape}, got {matrix.shape}")
            matrix.setflags(write=False)
            object.__setattr__(self, name, matrix)


@dataclass(frozen=True, eq=False)
class HeraldForms:
    """Coefficient families and matrices for one (r, kappa, T1, T2)"""
    params: ThermalSqueezeParams
    T1: float
    T2: float
    a0: float
    a: Tuple[float, float, float]
    b: Tuple[float, ...]
    c: Tuple[float, ...]
    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray

    @property
    def quadratic(self) -> QuadraticForms:
        return QuadraticForms(norm=4.0 / self.a0, M1=self.M1, M2=self.M2, M3=self.M3)


@lru_cache(maxsize=4096)
def build_forms(params: ThermalSqueezeParams, T1: float, T2: float) -> HeraldForms:
    """Closed-form a0, M1, M2, M3 for TMST parameters and beam-splitter transmissivities"""
    T1 = _validate_herald_transmissivity(T1, "T1")
    T2 = _validate_herald_transmissivity(T2, "T2")
    kappa = params.kappa
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    t1, t2 = math.sqrt(T1), math.sqrt(T2)
    r1, r2 = math.sqrt(1.0 - T1), math.sqrt(1.0 - T2)
    G1, G2 = 1.0 + T1, 1.0 + T2
    k2 = kappa ** 2
    cross = alpha * beta * kappa

    a0 = 4 * k2 * r1 ** 2 * r2 ** 2 + gamma * (1 - t1 ** 2 * t2 ** 2) + G1 * G2
    a1 = 4 * G1 * k2 * r2 ** 2 + gamma * (1 + t1 ** 2 * t2 ** 2) + G2 * r1 ** 2
    a2 = -16 * cross * t1 * t2
    a3 = 4 * G2 * k2 * r1 ** 2 + gamma * (1 + t1 ** 2 * t2 ** 2) + G1 * r2 ** 2

    b1 = r1 * (gamma + G2 + 4 * k2 * r2 ** 2)
    b2 = -8 * cross * r1 * t1 * t2
    b3 = -b1
    b4 = -8 * cross * r2 * t1 * t2
    b5 = r2 * (gamma + G1 + 4 * k2 * r1 ** 2)
    b6 = -b5
    b7 = r1 * t1 * (G2 - 4 * k2 * r2 ** 2 - gamma * t2 ** 2)
    b8 = 8 * cross * r1 * t2
    b9 = 8 * cross * r2 * t1
    b10 = r2 * t2 * (G1 - 4 * k2 * r1 ** 2 - gamma * t1 ** 2)

    c1 = r1 ** 2 * (gamma + G2 + 4 * k2 * r2 ** 2)
    c2 = 8 * cross * r1 * r2 * t1 * t2
    c3 = t1 * (2 * G2 + gamma * r2 ** 2)
    c4 = -8 * cross * r1 * r2 * t1
    c5 = r2 ** 2 * (gamma + G1 + 4 * k2 * r1 ** 2)
    c6 = -8 * cross * r1 * r2 * t2
    c7 = t2 * (2 * G1 + gamma * r1 ** 2)
    c8 = r1 ** 2 * (-G2 + 4 * k2 * r2 ** 2 + gamma * t2 ** 2)
    c9 = 8 * cross * r1 * r2
    c10 = r2 ** 2 * (-G1 + 4 * k2 * r1 ** 2 + gamma * t1 ** 2)

    if not a0 > 0:
        raise InternalConsistencyError(f"a0={a0} is not positive for {params}, T=({T1}, {T2})")

    M1 = -np.array([
        [a1, 0, a2, 0],
        [0, a1, 0, -a2],
        [a2, 0, a3, 0],
        [0, -a2, 0, a3],
    ]) / (4 * a0)

    i = 1j
    M2 = np.array([
        [b1, i * b1, b2, -i * b2],
        [b3, i * b1, -b2, -i * b2],
        [b4, -i * b4, b5, i * b5],
        [-b4, -i * b4, b6, i * b5],
        [b7, i * b7, b8, -i * b8],
        [-b7, i * b7, -b8, -i * b8],
        [b9, -i * b9, b10, i * b10],
        [-b9, -i * b9, -b10, i * b10],
    ]) / a0

    M3 = np.array([
        [0, c1, c2, 0, 0, c3, c4, 0],
        [c1, 0, 0, c2, c3, 0, 0, c4],
        [c2, 0, 0, c5, c6, 0, 0, c7],
        [0, c2, c5, 0, 0, c6, c7, 0],
        [0, c3, c6, 0, 0, c8, c9, 0],
        [c3, 0, 0, c6, c8, 0, 0, c9],
        [c4, 0, 0, c7, c9, 0, 0, c10],
        [0, c4, c7, 0, 0, c9, c10, 0],
    ]) / a0

    for matrix in (M1, M2, M3):
        matrix.setflags(write=False)

    logger.debug(f"Herald forms built for r={params.r}, kappa={kappa}, T=({T1}, {T2}): a0={a0:.6g}")
    return HeraldForms(
        params=params, T1=T1, T2=T2, a0=a0,
        a=(a1, a2, a3),
        b=(b1, b2, b3, b4, b5, b6, b7, b8, b9, b10),
        c=(c1, c2, c3, c4, c5, c6, c7, c8, c9, c10),
        M1=M1, M2=M2, M3=M3,
    )


def derive_forms_numerically(params: ThermalSqueezeParams, T1: float, T2: float) -> QuadraticForms:
    """
    Recompute the quadratic forms by integrating out the ancilla quadratures.

    Modes are ordered (A1, A2, F1, F2).  The input characteristic function is
    the TMST times the Fock generating forms of the ancillas, evaluated at
    B^-1 Lambda; each detector contributes the generating form of |n_i> with
    the sign of its auxiliary variables flipped (chi_n is even).  The ancilla
    arguments y are then eliminated by a Gaussian integral over R^4:

        M1 = -(Gxx - Gxy Gyy^-1 Gyx) / 2
        M2 = (Jx - Gxy Gyy^-1 Jy)^T
        M3 = C + Jy^T Gyy^-1 Jy / 2
        norm = det(Gyy)^-1/2
    """
    T1 = _validate_herald_transmissivity(T1, "T1")
    T2 = _validate_herald_transmissivity(T2, "T2")
    omega = symplectic_form(2)
    resource = tmst_state(params)

    kernel = np.zeros((8, 8))
    kernel[:4, :4] = omega @ resource.cov @ omega.T
    kernel[4:, 4:] = 0.5 * np.eye(4)

    splitters = beam_splitter(T1, 0, 2, mode_count=4).compose(beam_splitter(T2, 1, 3, mode_count=4))
    inverse = splitters.inverse().matrix

    # ancilla generating forms: tau -> s - t, sigma -> i (s + t)
    source = np.zeros((8, 8), dtype=complex)
    detector = np.zeros((8, 8), dtype=complex)
    pairing = np.zeros((8, 8))
    for mode in range(2):
        row = 4 + 2 * mode
        s, t = 2 * mode, 2 * mode + 1
        source[row, s], source[row, t] = 1.0, -1.0
        source[row + 1, s], source[row + 1, t] = 1j, 1j
        s_det, t_det = 4 + 2 * mode, 5 + 2 * mode
        detector[row, s_det], detector[row, t_det] = -1.0, 1.0
        detector[row + 1, s_det], detector[row + 1, t_det] = -1j, -1j
        for a, b in ((s, t), (s_det, t_det)):
            pairing[a, b] = pairing[b, a] = 1.0

    G = inverse.T @ kernel @ inverse
    G[4:, 4:] += 0.5 * np.eye(4)
    J = inverse.T @ source + detector

    Gxx, Gxy, Gyy = G[:4, :4], G[:4, 4:], G[4:, 4:]
    Jx, Jy = J[:4], J[4:]
    Gyy_inv = np.linalg.inv(Gyy)

    M1 = -0.5 * (Gxx - Gxy @ Gyy_inv @ Gxy.T)
    M2 = (Jx - Gxy @ Gyy_inv @ Jy).T
    M3 = pairing + 0.5 * Jy.T @ Gyy_inv @ Jy
    if np.abs(M3.imag).max() > settings.IMAG_TOLERANCE:
        raise InternalConsistencyError("Eliminated u-u form is not real")
    norm = 1.0 / math.sqrt(np.linalg.det(Gyy))
    return QuadraticForms(norm=norm, M1=0.5 * (M1 + M1.T), M2=M2, M3=0.5 * (M3.real + M3.real.T))


# =====================================================================
# CHARACTERISTIC FUNCTIONS AND PROBABILITY
# =====================================================================

def _as_real(value: complex, what: str) -> float:
    if abs(value.imag) > settings.IMAG_TOLERANCE * max(1.0, abs(value.real)):
        raise InternalConsistencyError(f"{what} has imaginary part {value.imag:.3e}")
    return float(value.real)


@dataclass(frozen=True, eq=False)
class CharSlice:
    """chi restricted to Lambda = P (tau, sigma): exp(x^T exponent x) * poly(x)"""
    exponent: np.ndarray
    poly: BivariatePoly


@dataclass(frozen=True, eq=False)
class UnnormalizedChar:
    """chi~ for one herald spec, split as exp(Lambda^T M1 Lambda) times a polynomial prefactor"""
    spec: HeraldSpec
    forms: QuadraticForms

    def prefactor(self, lam) -> complex:
        """norm * F exp(u^T M2 Lambda + u^T M3 u) at a point Lambda"""
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (4,):
            raise DimensionMismatchError(f"Lambda must have length 4, got shape {lam.shape}")
        series = exp_series(self.forms.M2 @ lam, self.forms.M3, self.spec.derivative_orders, HERALD_VARIABLES)
        value = extract_derivative(series, self.spec.derivative_orders, self.spec.operator_prefactor)
        return self.forms.norm * complex(value.coeffs[0, 0])

    def __call__(self, lam) -> float:
        lam = np.asarray(lam, dtype=float)
        gaussian = math.exp(float(lam @ self.forms.M1 @ lam))
        return _as_real(gaussian * self.prefactor(lam), f"chi~ of {self.spec.label}")

    def on_slice(self, projection: np.ndarray) -> CharSlice:
        """Symbolic restriction to Lambda = projection @ (tau, sigma)"""
        projection = np.asarray(projection, dtype=float)
        if projection.shape != (4, 2):
            raise DimensionMismatchError(f"Slice projection must be 4x2, got {projection.shape}")
        directions = self.forms.M2 @ projection
        linear = [BivariatePoly.linear(row[0], row[1]) for row in directions]
        series = exp_series(linear, self.forms.M3, self.spec.derivative_orders, HERALD_VARIABLES)
        poly = extract_derivative(series, self.spec.derivative_orders, self.spec.operator_prefactor)
        return CharSlice(exponent=projection.T @ self.forms.M1 @ projection, poly=poly * self.forms.norm)


def _forms_for(spec: HeraldSpec, params: ThermalSqueezeParams) -> QuadraticForms:
    return build_forms(params, spec.T1, spec.T2).quadratic


def unnormalized_char(spec: HeraldSpec, params: ThermalSqueezeParams,
                      forms: Optional[QuadraticForms] = None) -> UnnormalizedChar:
    return UnnormalizedChar(spec=spec, forms=forms or _forms_for(spec, params))


def success_probability(spec: HeraldSpec, params: ThermalSqueezeParams,
                        forms: Optional[QuadraticForms] = None) -> float:
    """chi~ at Lambda = 0"""
    if params.r == 0 and params.is_vacuum_seeded and (spec.n1 > spec.m1 or spec.n2 > spec.m2):
        # vacuum resource: more photons cannot be detected than were injected
        return 0.0
    char = unnormalized_char(spec, params, forms)
    probability = _as_real(char.prefactor(np.zeros(4)), f"P of {spec.label}")
    if probability < -settings.NEGATIVE_PROBABILITY_TOLERANCE:
        raise InternalConsistencyError(f"Negative success probability {probability:.3e} for {spec} at {params}")
    if probability > 1.0 + 1e-9:
        raise InternalConsistencyError(f"Success probability {probability:.12g} exceeds 1 for {spec} at {params}")
    return min(max(probability, 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class NgState:
    """Normalized heralded state: chi = chi~ / P"""
    spec: HeraldSpec
    params: ThermalSqueezeParams
    forms: QuadraticForms
    prob: float

    @property
    def unnormalized(self) -> UnnormalizedChar:
        return UnnormalizedChar(spec=self.spec, forms=self.forms)

    def char(self, lam) -> float:
        return self.unnormalized(lam) / self.prob

    def __call__(self, lam) -> float:
        return self.char(lam)

    def on_slice(self, projection: np.ndarray) -> CharSlice:
        raw = self.unnormalized.on_slice(projection)
        return CharSlice(exponent=raw.exponent, poly=raw.poly * (1.0 / self.prob))


def normalized_char(spec: HeraldSpec, params: ThermalSqueezeParams,
                    forms: Optional[QuadraticForms] = None) -> NgState:
    forms = forms or _forms_for(spec, params)
    probability = success_probability(spec, params, forms)
    if probability <= settings.PROBABILITY_FLOOR:
        raise DegenerateHeraldError(f"Heralding {spec} at r={params.r}, kappa={params.kappa} has probability {probability:.3e}")
    logger.debug(f"Heralded {spec} at r={params.r}, kappa={params.kappa}: P={probability:.6g}")
    return NgState(spec=spec, params=params, forms=forms, prob=probability)


def ideal_state(spec: HeraldSpec, params: ThermalSqueezeParams) -> NgState:
    """Unit-transmissivity limit: exact T=1 for catalysis, T = 1 - eps otherwise"""
    T = 1.0 if spec.is_catalysis else 1.0 - settings.IDEAL_LIMIT_EPS
    return normalized_char(spec.at(T), params)
