from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Application
    DEBUG: bool = False

    # Group guards
    MAX_CLASS: int = 4
    DEFAULT_RANK: int = 2
    DEFAULT_CLASS: int = 2

    # Valuation
    VALUATION_CAP: int = 8

    # Bounded search
    SEARCH_MAX_LENGTH: int = 4
    SEARCH_EXPONENT_CAP: int = 3
    SEARCH_MAX_CANDIDATES: int = 250_000

    # Grid scans
    SCAN_WORKERS: int = 1

    # Verify the fundamental identity after every group operation
    CHECK_INVARIANTS: bool = False

    @property
    def log_level(self) -> str:
        return "DEBUG" if self.DEBUG else "WARNING"

    model_config = {"env_file": ".env", "env_prefix": "SOLVKIT_", "extra": "ignore"}


settings = Settings()
