from pydantic import BaseModel, Field, field_validator
from typing import List, Optional

from app.core.config import settings
from app.schemas.hmm_schema import HmmDocument, TopPReportSchema


# -------------------------------------------------
# ANALYSIS REPORT
# -------------------------------------------------
class BoundRow(BaseModel):
    p: float
    # None when gamma is 0 (no mixing guarantee) or was not computed
    mixing_bound: Optional[float] = None
    linear_bound: float
    effective_bound: float
    truncated_gamma: Optional[float] = None


class ContractionSummary(BaseModel):
    trials: int
    max_ratio: float
    threshold: float
    passed: bool

    class Config:
        from_attributes = True


class AnalysisReport(BaseModel):
    n_states: int
    n_obs: int
    horizon: int
    gamma: Optional[float] = None
    mixing_guarantee: bool
    note: Optional[str] = None
    bounds: List[BoundRow]
    contraction: Optional[ContractionSummary] = None


# -------------------------------------------------
# HTTP REQUESTS / RESPONSES
# -------------------------------------------------
class TopPRequest(BaseModel):
    probs: List[float] = Field(..., min_length=1)
    p: float


class TopPResponse(BaseModel):
    distribution: List[float]
    kept_mass: float
    kept_indices: List[int]
    top_p_set: List[int]


class TotalVariationRequest(BaseModel):
    a: List[float] = Field(..., min_length=1)
    b: List[float] = Field(..., min_length=1)


class TotalVariationResponse(BaseModel):
    tv: float


class AnalyzeRequest(BaseModel):
    model: HmmDocument
    p_values: List[float] = Field(default_factory=lambda: list(settings.DEFAULT_P_VALUES))
    horizon: int = Field(default_factory=lambda: settings.DEFAULT_HORIZON, ge=0)
    contraction_trials: int = Field(0, ge=0)

    @field_validator("p_values")
    @classmethod
    def check_p_values(cls, values: List[float]) -> List[float]:
        for p in values:
            if not (0.0 < p <= 1.0):
                raise ValueError(f"p must be in (0, 1], got {p}")
        return values


class TruncateRequest(BaseModel):
    model: HmmDocument
    p: float = Field(..., gt=0.0, le=1.0)


class TruncateResponse(BaseModel):
    model: HmmDocument
    report: TopPReportSchema
