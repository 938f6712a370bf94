from pydantic_settings import BaseSettings
from pydantic import Field
from typing import List, Optional


class Settings(BaseSettings):
    # -----------------------------
    # NUMERICS
    # -----------------------------
    SUM_TOLERANCE: float = 1e-9
    BOUND_SLACK: float = 1e-9
    ZERO_TOL: float = 0.0

    # -----------------------------
    # EXPERIMENTS
    # -----------------------------
    DEFAULT_P_VALUES: List[float] = Field(default_factory=lambda: [0.5, 0.7, 0.9])
    DEFAULT_HORIZON: int = 50
    DEFAULT_REPETITIONS: int = 5

    # above this many states gamma is only computed when asked for
    GAMMA_ON_DEMAND_STATES: int = 2000

    # -----------------------------
    # FILES
    # -----------------------------
    MODEL_FILE_VERSION: int = 1
    CORPUS_PATH: Optional[str] = None

    # -----------------------------
    # APP
    # -----------------------------
    LOG_LEVEL: str = "INFO"
    ENVIRONMENT: str = "development"

    class Config:
        env_file = ".env"
        extra = "ignore"


settings = Settings()
