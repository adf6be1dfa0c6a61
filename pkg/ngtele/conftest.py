"""
Shared pytest setup for the ngtele test suites
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add the application directory to path
sys.path.insert(0, str(Path(__file__).parent))

from core.phase_space import ThermalSqueezeParams  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tmst_reference():
    """kappa = 0.51, r = 0.64: the 1-PS TMST operating point"""
    return ThermalSqueezeParams(r=0.64, kappa=0.51)


@pytest.fixture
def random_lambdas(rng):
    def draw(count: int = 20, scale: float = 1.5) -> np.ndarray:
        return rng.uniform(-scale, scale, size=(count, 4))
    return draw
