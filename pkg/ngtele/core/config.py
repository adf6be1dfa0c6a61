"""
Configuration settings for ngtele
"""

from pathlib import Path
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings"""

    # Application
    APP_NAME: str = "ngtele"
    VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Paths
    BASE_DIR: Path = Path(__file__).parent.parent.parent
    LOG_DIR: Path = BASE_DIR / "logs"

    # Fock-basis oracle
    DEFAULT_CUTOFF: int = 25
    ORACLE_MARGIN: int = 12  # extra levels while exponentiating generators
    ORACLE_TRACE_TOLERANCE: float = 1e-6
    ORACLE_PROBABILITY_FLOOR: float = 1e-12

    # Truncated series engine
    MAX_SERIES_ENTRIES: int = 4_000_000

    # Herald / teleport numerics
    IDEAL_LIMIT_EPS: float = 1e-9
    T_FLOOR: float = 1e-6
    PROBABILITY_FLOOR: float = 1e-300
    IMAG_TOLERANCE: float = 1e-10
    NEGATIVE_PROBABILITY_TOLERANCE: float = 1e-12

    # Phase-space checks
    PHYSICALITY_TOLERANCE: float = 1e-10
    SYMPLECTIC_TOLERANCE: float = 1e-12

    # Sweeps
    DEFAULT_WORKERS: int = 1
    FLOAT_SIGNIFICANT_DIGITS: int = 10

    class Config:
        env_file = ".env"
        env_prefix = "NGTELE_"
        case_sensitive = True

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        # Create the log directory if it doesn't exist
        self.LOG_DIR.mkdir(parents=True, exist_ok=True)


# Global settings instance
settings = Settings()
