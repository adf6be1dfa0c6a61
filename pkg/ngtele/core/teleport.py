"""
Unit-gain Braunstein-Kimble teleportation through heralded TMST resources.

The output characteristic function is chi_in(Lambda) chi_res(tau, -sigma, tau, sigma),
so the fidelity collapses to one 2D integral

    F = (1/2 pi) int chi_in(L) chi_in(-L) chi_res(tau, -sigma, tau, sigma) d^2L

which is Gaussian times a polynomial and is done in closed form.
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy import integrate

from core.exceptions import ParameterDomainError
from core.herald import HeraldSpec, NgState, normalized_char
from core.phase_space import ThermalSqueezeParams
from core.poly_engine import GaussianWeight2D, gaussian_moment_integral

logger = logging.getLogger(__name__)

# Lambda = (tau, -sigma, tau, sigma)
TELEPORT_PROJECTION = np.array([
    [1.0, 0.0],
    [0.0, -1.0],
    [1.0, 0.0],
    [0.0, 1.0],
])


@dataclass(frozen=True)
class InputState:
    """Coherent state (d_x, d_p) or squeezed vacuum with squeezing epsilon"""
    kind: Literal["coherent", "sqvac"] = "coherent"
    d_x: float = 0.0
    d_p: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ("coherent", "sqvac"):
            raise ParameterDomainError(f"Unknown input state '{self.kind}'")
        for name in ("d_x", "d_p", "epsilon"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterDomainError(f"Input parameter {name}={getattr(self, name)} must be finite")

    @classmethod
    def coherent(cls, d_x: float = 0.0, d_p: float = 0.0) -> "InputState":
        return cls(kind="coherent", d_x=d_x, d_p=d_p)

    @classmethod
    def squeezed_vacuum(cls, epsilon: float) -> "InputState":
        return cls(kind="sqvac", epsilon=epsilon)

    @property
    def weight(self) -> GaussianWeight2D:
        """chi_in(L) chi_in(-L); the displacement phases cancel"""
        if self.kind == "coherent":
            return GaussianWeight2D(0.5 * np.eye(2))
        return GaussianWeight2D(0.5 * np.diag([math.exp(2 * self.epsilon), math.exp(-2 * self.epsilon)]))

    @property
    def label(self) -> str:
        return "coherent" if self.kind == "coherent" else f"sqvac(eps={self.epsilon:g})"


@dataclass(frozen=True)
class TeleportReport:
    spec: HeraldSpec
    params: ThermalSqueezeParams
    input: InputState
    F: float
    F_base: float
    P: float

    @property
    def deltaF(self) -> float:
        return self.F - self.F_base

    @property
    def R(self) -> float:
        return self.deltaF * self.P

    def as_row(self) -> dict:
        return {
            "spec": self.spec.label,
            "r": self.params.r,
            "kappa": self.params.kappa,
            "T1": self.spec.T1,
            "T2": self.spec.T2,
            "F": self.F,
            "F_base": self.F_base,
            "deltaF": self.deltaF,
            "P": self.P,
            "R": self.R,
        }


def fidelity(resource: NgState, input_state: InputState) -> float:
    """Closed-form BK fidelity of input_state through the heralded resource"""
    state_slice = resource.on_slice(TELEPORT_PROJECTION)
    weight = input_state.weight + GaussianWeight2D(-state_slice.exponent)
    value = gaussian_moment_integral(state_slice.poly, weight)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        logger.warning(f"Fidelity of {resource.spec} has imaginary residue {value.imag:.3e}")
    return float(value.real)


def fidelity_tmst_closed_form(params: ThermalSqueezeParams, input_state: InputState) -> float:
    noise = 2.0 * params.kappa * math.exp(-2.0 * params.r)
    if input_state.kind == "coherent":
        return 1.0 / (1.0 + noise)
    e = math.exp(2.0 * input_state.epsilon)
    return 1.0 / math.sqrt((e + noise) * (1.0 / e + noise))


def fidelity_by_quadrature(resource: NgState, input_state: InputState, limit: Optional[float] = None) -> float:
    """Adaptive 2D quadrature of the raw BK integrand, for cross-checks"""
    weight = input_state.weight
    if limit is None:
        # integrand decays at least as fast as the input weight
        limit = math.sqrt(40.0 / np.linalg.eigvalsh(weight.Q).min())

    def integrand(sigma, tau):
        lam = TELEPORT_PROJECTION @ np.array([tau, sigma])
        return float(weight.evaluate(tau, sigma)) * resource.char(lam)

    value, _ = integrate.dblquad(integrand, -limit, limit, -limit, limit, epsabs=1e-12, epsrel=1e-10)
    return value / (2.0 * math.pi)


def report(spec: HeraldSpec, params: ThermalSqueezeParams, input_state: InputState) -> TeleportReport:
    resource = normalized_char(spec, params)
    report_ = TeleportReport(
        spec=spec,
        params=params,
        input=input_state,
        F=fidelity(resource, input_state),
        F_base=fidelity_tmst_closed_form(params, input_state),
        P=resource.prob,
    )
    logger.debug(
        f"Teleport {spec} r={params.r} kappa={params.kappa} {input_state.label}: "
        f"F={report_.F:.6g} dF={report_.deltaF:.3e} P={report_.P:.3e}"
    )
    return report_
