from pydantic import BaseModel, Field
from typing import Annotated, List, Literal, Optional, Union


# -------------------------------------------------
# MATRIX BLOCKS
# -------------------------------------------------
class DenseMatrix(BaseModel):
    """Row-major; for transition, row i / column j is P(next=i | current=j)."""

    format: Literal["dense"] = "dense"
    rows: List[List[float]]


class SparseMatrix(BaseModel):
    """Compressed row storage, same orientation as the dense block."""

    format: Literal["sparse"] = "sparse"
    n_rows: int = Field(..., ge=1)
    n_cols: int = Field(..., ge=1)
    row_starts: List[int]
    cols: List[int]
    vals: List[float]


MatrixBlock = Annotated[
    Union[DenseMatrix, SparseMatrix],
    Field(discriminator="format"),
]


# -------------------------------------------------
# TOP-P REPORT
# -------------------------------------------------
class TopPReportSchema(BaseModel):
    p: float
    transition_sparsity: float
    observation_sparsity: float
    min_kept_mass: float
    per_column_kept_mass: List[float]
    observation_kept_mass: List[float] = Field(default_factory=list)
    prior_kept_mass: float = 1.0

    class Config:
        from_attributes = True


class TopPBlock(BaseModel):
    p: float
    report: TopPReportSchema


# -------------------------------------------------
# MODEL DOCUMENT
# -------------------------------------------------
class HmmDocument(BaseModel):
    version: int = 1
    n_states: int = Field(..., ge=1)
    n_obs: int = Field(..., ge=1)
    state_labels: Optional[List[str]] = None
    obs_labels: Optional[List[str]] = None
    prior: List[float]
    transition: MatrixBlock
    observation: MatrixBlock
    top_p: Optional[TopPBlock] = None
