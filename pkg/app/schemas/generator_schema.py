from pydantic import BaseModel, Field, model_validator
from typing import Optional
from enum import Enum


# -------------------------------------------------
# ENUMS
# -------------------------------------------------
class GeneratorKind(str, Enum):
    BELL = "bell"
    UNIFORM = "uniform"
    WEATHER = "weather"


# -------------------------------------------------
# BELL HMM
# -------------------------------------------------
class BellSpec(BaseModel):
    """
    Per column, `heavy_count` seeded states share `heavy_mass`
    and the remaining states share the rest uniformly.
    """

    n_states: int = Field(800, ge=2)
    heavy_count: int = Field(5, ge=1)
    heavy_mass: float = Field(0.9, gt=0.0, lt=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def check_groups(self):
        if self.heavy_count >= self.n_states:
            raise ValueError("heavy_count must be smaller than n_states")

        heavy = self.heavy_mass / self.heavy_count
        light = (1.0 - self.heavy_mass) / (self.n_states - self.heavy_count)
        if heavy <= light:
            raise ValueError("heavy entries must outweigh light entries")

        return self


# -------------------------------------------------
# CORPUS (LM HMM)
# -------------------------------------------------
class CorpusSpec(BaseModel):
    """
    Either `path` (UTF-8 text file) or inline `text`.
    Tokens are whitespace separated; punctuation stays attached.
    """

    path: Optional[str] = None
    text: Optional[str] = None
    lowercase: bool = False
    min_count: int = Field(1, ge=1)
    unknown_token: str = "<unk>"

    @model_validator(mode="after")
    def check_source(self):
        if (self.path is None) == (self.text is None):
            raise ValueError("exactly one of path or text is required")
        return self


# -------------------------------------------------
# GENERATE REQUEST
# -------------------------------------------------
class GenerateRequest(BaseModel):
    kind: GeneratorKind
    states: int = Field(800, ge=2)
    heavy_count: int = Field(5, ge=1)
    heavy_mass: float = Field(0.9, gt=0.0, lt=1.0)
    seed: int = 0
