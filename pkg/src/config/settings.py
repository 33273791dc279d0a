"""
Application Configuration Settings
"""

from pydantic import field_validator
from pydantic_settings import BaseSettings
import os


class Settings(BaseSettings):
    """Application settings"""

    # Application
    APP_NAME: str = "cmfield"
    APP_VERSION: str = "1.0.0"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = "logs/cmfield.log"
    ERROR_LOG_FILE: str = "logs/error.log"
    CHECK_LOG_FILE: str = "logs/checks.log"

    # Precision policy
    DEFAULT_DIGITS: int = 100
    MAIN_DIGITS: int = 200
    GUARD_DIGITS: int = 20
    MAX_ESCALATIONS: int = 3

    # L-series summation
    DEFAULT_CUTOFF: int = 1_000_000

    # Randomized suites
    DEFAULT_SEED: int = 20180101
    DEFAULT_SAMPLES: int = 20

    # Worker processes for invariant tables (0 = available parallelism)
    THREADS: int = 0

    # Ideal searches
    IDEAL_SEARCH_START: int = 50
    GAMMA_SEARCH_CAP: int = 100_000_000
    REPRESENTATIVE_SEARCH_CAP: int = 1_000_000

    @field_validator("DEFAULT_DIGITS", "MAIN_DIGITS")
    @classmethod
    def check_digits(cls, value: int) -> int:
        """Working precision below 30 digits cannot separate Weber values"""
        if value < 30:
            raise ValueError("digits must be at least 30")
        return value

    @field_validator("GUARD_DIGITS")
    @classmethod
    def check_guard(cls, value: int) -> int:
        if value < 10:
            raise ValueError("guard digits must be at least 10")
        return value

    @property
    def worker_count(self) -> int:
        """Resolve THREADS=0 to the available parallelism"""
        if self.THREADS > 0:
            return self.THREADS
        return os.cpu_count() or 1

    class Config:
        env_file = ".env"
        case_sensitive = True


# Create settings instance
settings = Settings()


os.makedirs(os.path.dirname(settings.LOG_FILE) or "logs", exist_ok=True)
