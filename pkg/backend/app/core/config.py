"""Application configuration."""
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional


class Settings(BaseSettings):
    """Application settings."""

    # Project
    PROJECT_NAME: str = "Santalo Bench"
    VERSION: str = "1.0.0"

    # Storage
    OUTPUT_DIR: str = "./storage/output"
    LOGS_DIR: str = "./storage/logs"
    LOG_LEVEL: str = "INFO"

    # Dimension caps
    MAX_EXACT_DIM: int = 6
    MAX_QUADRATURE_DIM: int = 4

    # Quadrature
    QUAD_TOL: float = 1e-6
    QUAD_MAX_DEPTH: int = 48
    QUAD_MAX_PANELS: int = 20000

    # Monte Carlo
    MC_SAMPLES: int = 1_000_000
    MC_BLOCK_SIZE: int = 65536
    MC_ANTITHETIC: bool = True

    # Geometric-mean body search
    GM_ITERS: int = 400
    FIBER_BISECT_ITERS: int = 60

    # Tolerances
    GAUGE_TOL: float = 1e-7
    VALIDATION_SAMPLES: int = 1000

    # Batch runs
    SEED: int = 0
    JOBS: int = 1

    # Celery (optional; local thread pool when unset)
    CELERY_BROKER_URL: Optional[str] = None
    CELERY_RESULT_BACKEND: Optional[str] = None

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True)


settings = Settings()
