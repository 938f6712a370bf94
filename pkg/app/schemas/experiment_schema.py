from pydantic import BaseModel, Field, field_validator, model_validator
from typing import List, Optional
from enum import Enum

from app.core.config import settings
from app.schemas.generator_schema import GeneratorKind


# -------------------------------------------------
# ENUMS
# -------------------------------------------------
class TruncationMode(str, Enum):
    MODEL = "model"
    MESSAGE = "message"


class RecordStatus(str, Enum):
    OK = "ok"
    FAILED = "failed"


# -------------------------------------------------
# MODEL SOURCE
# -------------------------------------------------
class ModelSource(BaseModel):
    """A generator spec or a model file, never both."""

    generator: Optional[GeneratorKind] = None
    path: Optional[str] = None

    states: int = Field(800, ge=2)
    heavy_count: int = Field(5, ge=1)
    heavy_mass: float = Field(0.9, gt=0.0, lt=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def check_source(self):
        if (self.generator is None) == (self.path is None):
            raise ValueError("exactly one of generator or path is required")
        return self

    @property
    def name(self) -> str:
        if self.path is not None:
            return self.path
        if self.generator is GeneratorKind.WEATHER:
            return "weather"
        return f"{self.generator.value}{self.states}"


# -------------------------------------------------
# CONFIG
# -------------------------------------------------
class ExperimentConfig(BaseModel):
    source: ModelSource
    p_values: List[float] = Field(default_factory=lambda: list(settings.DEFAULT_P_VALUES))
    horizon: int = Field(default_factory=lambda: settings.DEFAULT_HORIZON, ge=1)
    obs_period: Optional[int] = Field(None, ge=1)
    mode: TruncationMode = TruncationMode.MODEL
    seed: int = 0
    repetitions: int = Field(default_factory=lambda: settings.DEFAULT_REPETITIONS, ge=1)

    # None: decide by model size (GAMMA_ON_DEMAND_STATES)
    compute_gamma: Optional[bool] = None

    @field_validator("p_values")
    @classmethod
    def check_p_values(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("at least one p value is required")
        for p in values:
            if not (0.0 < p <= 1.0):
                raise ValueError(f"p must be in (0, 1], got {p}")
        return values


# -------------------------------------------------
# RECORDS
# -------------------------------------------------
class StepRecord(BaseModel):
    step: int
    tv: float
    dense_cumulative_ms: float
    topp_cumulative_ms: float


class ExperimentRecord(BaseModel):
    model: str
    p: float
    mode: TruncationMode
    horizon: int
    obs_period: Optional[int] = None
    seed: int = 0
    status: RecordStatus = RecordStatus.OK
    error: Optional[str] = None

    steps: List[StepRecord] = Field(default_factory=list)

    sparsity: float
    gamma: Optional[float] = None
    bound_mixing: Optional[float] = None
    bound_linear: float

    tv_final: Optional[float] = None
    tv_max: Optional[float] = None
    tv_mean: Optional[float] = None
    speedup: Optional[float] = None

    bounds_ok: bool = True
    bound_note: Optional[str] = None

    @model_validator(mode="after")
    def check_times(self):
        for previous, current in zip(self.steps, self.steps[1:]):
            if (
                current.dense_cumulative_ms < previous.dense_cumulative_ms
                or current.topp_cumulative_ms < previous.topp_cumulative_ms
            ):
                raise ValueError("cumulative times must be non-decreasing")
        return self


# -------------------------------------------------
# CSV
# -------------------------------------------------
STEP_COLUMNS = [
    "model",
    "p",
    "mode",
    "step",
    "tv",
    "dense_cumulative_ms",
    "topp_cumulative_ms",
]

SUMMARY_COLUMNS = [
    "sparsity",
    "gamma",
    "bound_mixing",
    "bound_linear",
    "tv_final",
    "tv_max",
    "tv_mean",
    "speedup",
]

CSV_COLUMNS = ["kind"] + STEP_COLUMNS + SUMMARY_COLUMNS + ["status", "error"]
