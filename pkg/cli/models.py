from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator

from mixedtraces.experiments import PipelineParams


class ExperimentKind(str, Enum):
    WHITNEY_AUDIT = "whitney-audit"
    EXTENSION_BOUND = "extension-bound"
    HARDY_SWEEP = "hardy-sweep"
    INTERPOLATION_EQUIVALENCE = "interpolation-equivalence"
    ELLIPTIC_SUITE = "elliptic-suite"
    CIGAR_CHECK = "cigar-check"


class SweepParams(BaseModel):
    s_list: List[float] = [0.3, 0.5, 0.7]
    p_list: List[float] = [1.5, 2.0, 3.0]
    h_list: Optional[List[float]] = None
    depth: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None
    family_size: Optional[int] = Field(default=None, ge=1)
    budget: Optional[float] = Field(default=None, gt=1)
    k_depth: Optional[int] = Field(default=None, ge=1)
    coefficient_field: Optional[str] = None
    eps_target: float = Field(default=0.05, gt=0)
    K_target: float = Field(default=8.0, gt=0)
    cigar_pairs: int = Field(default=16, ge=1)

    @field_validator("s_list")
    @classmethod
    def _s_in_range(cls, values):
        if not values or any(not 0 < s <= 1 for s in values):
            raise ValueError("s values must lie in (0, 1]")
        return values

    @field_validator("p_list")
    @classmethod
    def _p_in_range(cls, values):
        if not values or any(not p >= 1 for p in values):
            raise ValueError("p values must be at least 1")
        return values

    @field_validator("h_list")
    @classmethod
    def _h_positive(cls, values):
        if values is not None and (not values or any(not h > 0 for h in values)):
            raise ValueError("h values must be positive")
        return values

    def to_pipeline(self) -> PipelineParams:
        return PipelineParams(**self.model_dump())


class ExperimentConfig(BaseModel):
    experiment: ExperimentKind
    fixture: str
    params: SweepParams = SweepParams()
    out_dir: Optional[Path] = None
    check_determinism: bool = False
    max_workers: Optional[int] = Field(default=None, ge=1)
