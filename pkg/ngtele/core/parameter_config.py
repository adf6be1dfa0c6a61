"""
Central Parameter Configuration
Single source of truth for all physical parameter ranges used by the library

All components (herald, teleport, optimizer, CLI) import ranges and
validators from this file so every entry point accepts the same domain.
"""

import math
from typing import Dict

import numpy as np

from core.exceptions import ParameterDomainError

# =====================================================================
# PHYSICAL PARAMETERS - SINGLE SOURCE OF TRUTH
# =====================================================================

# Two-mode squeezing r
SQUEEZING_MIN = 0.0
SQUEEZING_MAX = 1.5
SQUEEZING_DEFAULT = 0.64
SQUEEZING_STEP = 0.01
SQUEEZING_UNIT = "nepers"
SQUEEZING_DESCRIPTION = "Two-mode squeezing parameter r of the resource state"

# Beam-splitter transmissivity T (T = 0 excluded: total reflection)
TRANSMISSIVITY_MIN = 0.01
TRANSMISSIVITY_MAX = 1.0
TRANSMISSIVITY_STEP = 0.01
TRANSMISSIVITY_UNIT = "fraction"
TRANSMISSIVITY_DESCRIPTION = "Power transmissivity of the heralding beam splitters"

# Thermal parameter kappa = n_th + 1/2
KAPPA_MIN = 0.5
KAPPA_MAX = 1.5
KAPPA_DEFAULT = 0.51
KAPPA_STEP = 0.005
KAPPA_UNIT = "quanta"
KAPPA_DESCRIPTION = "Thermal parameter kappa = n_th + 1/2 (0.5 is the TMSV)"

# Squeezing of a squeezed-vacuum input state
INPUT_SQUEEZING_DEFAULT = 1.7
INPUT_SQUEEZING_UNIT = "nepers"
INPUT_SQUEEZING_DESCRIPTION = "Squeezing epsilon of the teleported squeezed vacuum"

# Reference thermal parameters for the TMST / TMSV comparisons
KAPPA_TMST_REFERENCE = KAPPA_DEFAULT
KAPPA_TMSV = 0.5

# Largest photon count accepted per ancilla/detector
MAX_PHOTON_COUNT = 6

# Optimal catalysis transmissivity counts as "unity" above this value
UNIT_TRANSMISSIVITY_THRESHOLD = 0.999

# Coherent-state teleportation with classical resources cannot beat this
CLASSICAL_FIDELITY_BOUND = 0.5


def get_squeezing_parameters() -> Dict:
    """Get squeezing parameters for grids and CLI help"""
    return {
        'min': SQUEEZING_MIN,
        'max': SQUEEZING_MAX,
        'default': SQUEEZING_DEFAULT,
        'step': SQUEEZING_STEP,
        'unit': SQUEEZING_UNIT,
        'description': SQUEEZING_DESCRIPTION
    }


def get_transmissivity_parameters() -> Dict:
    """Get transmissivity parameters for grids and CLI help"""
    return {
        'min': TRANSMISSIVITY_MIN,
        'max': TRANSMISSIVITY_MAX,
        'step': TRANSMISSIVITY_STEP,
        'unit': TRANSMISSIVITY_UNIT,
        'description': TRANSMISSIVITY_DESCRIPTION
    }


def get_kappa_parameters() -> Dict:
    """Get thermal parameters for grids and CLI help"""
    return {
        'min': KAPPA_MIN,
        'max': KAPPA_MAX,
        'default': KAPPA_DEFAULT,
        'step': KAPPA_STEP,
        'unit': KAPPA_UNIT,
        'description': KAPPA_DESCRIPTION
    }


def get_input_squeezing_parameters() -> Dict:
    """Get squeezed-vacuum input parameters"""
    return {
        'default': INPUT_SQUEEZING_DEFAULT,
        'unit': INPUT_SQUEEZING_UNIT,
        'description': INPUT_SQUEEZING_DESCRIPTION
    }


def grid_text(parameters: Dict) -> str:
    """'MIN:MAX:STEP' grid flag for a get_*_parameters() dict"""
    return f"{parameters['min']:g}:{parameters['max']:g}:{parameters['step']:g}"


def describe(parameters: Dict) -> str:
    """One-line CLI help for a get_*_parameters() dict"""
    parts = [parameters['description']]
    if 'min' in parameters:
        parts.append(f"range {parameters['min']:g} to {parameters['max']:g} {parameters['unit']}")
    if 'default' in parameters:
        parts.append(f"default {parameters['default']:g}")
    return "; ".join(parts)


# =====================================================================
# VALIDATION
# =====================================================================

def validate_transmissivity(T: float, allow_zero: bool = False) -> float:
    """Check 0 < T <= 1 (or 0 <= T <= 1 when allow_zero)"""
    T = float(T)
    if not math.isfinite(T) or T > 1.0 or T < 0.0 or (T == 0.0 and not allow_zero):
        bound = "[0, 1]" if allow_zero else "(0, 1]"
        raise ParameterDomainError(f"Transmissivity {T} outside {bound}")
    return T


def validate_kappa(kappa: float) -> float:
    """Check kappa >= 1/2"""
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa < KAPPA_MIN:
        raise ParameterDomainError(f"Thermal parameter kappa={kappa} below {KAPPA_MIN}")
    return kappa


def validate_squeezing(r: float) -> float:
    """Check r is finite and non-negative"""
    r = float(r)
    if not math.isfinite(r) or r < SQUEEZING_MIN:
        raise ParameterDomainError(f"Squeezing r={r} must be finite and >= 0")
    return r


def validate_photon_count(n: int, name: str = "photon count") -> int:
    """Check a Fock count is a small non-negative integer"""
    if int(n) != n or n < 0 or n > MAX_PHOTON_COUNT:
        raise ParameterDomainError(f"{name}={n} must be an integer in [0, {MAX_PHOTON_COUNT}]")
    return int(n)


# =====================================================================
# GRIDS AND CLASSICALITY
# =====================================================================

def parse_grid(text: str) -> np.ndarray:
    """Parse an 'A:B:STEP' flag into an inclusive grid"""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError as e:
        raise ParameterDomainError(f"Grid '{text}' is not of the form A:B:STEP") from e
    return make_grid(start, stop, step)


def make_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid rounded to the step's decimals so endpoints are exact"""
    if step <= 0 or stop < start:
        raise ParameterDomainError(f"Empty grid {start}:{stop}:{step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    decimals = max(0, -int(math.floor(math.log10(step))) + 2)
    return np.round(start + step * np.arange(count), decimals)


def default_squeezing_grid() -> np.ndarray:
    return make_grid(SQUEEZING_MIN, SQUEEZING_MAX, SQUEEZING_STEP)


def default_transmissivity_grid() -> np.ndarray:
    return make_grid(TRANSMISSIVITY_MIN, TRANSMISSIVITY_MAX, TRANSMISSIVITY_STEP)


def classical_squeezing_threshold(kappa: float) -> float:
    """Squeezing below which the TMST state stays classical: r = ln(2 kappa) / 2"""
    return 0.5 * math.log(2.0 * validate_kappa(kappa))


def is_classical_tmst(r: float, kappa: float) -> bool:
    """TMST is classical while exp(-2r) kappa >= 1/2"""
    return math.exp(-2.0 * r) * kappa >= KAPPA_MIN
