"""Pydantic schemas for experiment configuration documents."""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from app.core.config import settings


class MeasureKind(str, Enum):
    """Measures available from configuration."""
    GAUSSIAN = "gaussian"
    PRODUCT_EXPONENTIAL = "product_exponential"
    LEBESGUE_BOX = "lebesgue_box"
    UNIFORM_BODY = "uniform_body"
    CORRELATED_GAUSSIAN = "correlated_gaussian"


class CheckName(str, Enum):
    """Inequality checks selectable in an experiment."""
    SANTALO = "santalo"
    CLAIM1 = "claim1"
    CHAIN = "chain"
    MAIN = "main"
    COROLLARY = "corollary"
    MEYER_PAJOR = "meyer_pajor"
    PROP8 = "prop8"
    BALL_LOGCONCAVITY = "ball_logconcavity"
    FIBERWISE = "fiberwise"
    B_PROPERTY = "b_property"


# Checks that integrate a measure numerically
QUADRATURE_CHECKS = {
    CheckName.CLAIM1, CheckName.CHAIN, CheckName.MAIN, CheckName.PROP8,
    CheckName.BALL_LOGCONCAVITY, CheckName.FIBERWISE, CheckName.B_PROPERTY,
}
# Checks without a measure argument
BODY_ONLY_CHECKS = {CheckName.SANTALO, CheckName.COROLLARY, CheckName.MEYER_PAJOR}


class MeasureSpec(BaseModel):
    """Measure description: per-axis parameters broadcast from a single value."""
    kind: MeasureKind
    params: List[float] = Field(default_factory=list)
    body: Optional[str] = None
    cov: Optional[List[List[float]]] = None
    id: Optional[str] = None


class CorpusSpec(BaseModel):
    """Generated bodies and/or explicit body files."""
    count: int = Field(default=0, ge=0)
    vertex_pairs: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    files: List[str] = Field(default_factory=list)
    standard: bool = False


class Tolerances(BaseModel):
    quad_tol: float = Field(default_factory=lambda: settings.QUAD_TOL, gt=0, lt=1)
    mc_samples: int = Field(default_factory=lambda: settings.MC_SAMPLES, ge=1000)


class CheckOptions(BaseModel):
    """Per-check sampling parameters."""
    samples: int = Field(default=10_000, ge=1)
    z_fractions: List[float] = Field(default_factory=lambda: [0.0, 0.5, 0.99])
    t_grid: List[float] = Field(default_factory=lambda: [-1.0 + 0.25 * i for i in range(9)])
    fiber_samples: int = Field(default=64, ge=1)


class SweepSpec(BaseModel):
    """Grid for dilation sweeps: radii r of rB or exponents t of e^t B."""
    radii: List[float] = Field(default_factory=list)
    t_grid: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_grid(self) -> "SweepSpec":
        if not self.radii and not self.t_grid:
            raise ValueError("sweep needs radii or t_grid")
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")
        return self


class ExperimentConfig(BaseModel):
    """Experiment document read by the verify, sweep and explore commands."""
    dim: int = Field(ge=1)
    corpus: CorpusSpec = Field(default_factory=CorpusSpec)
    measures: List[MeasureSpec] = Field(default_factory=list)
    checks: List[CheckName] = Field(default_factory=list)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    options: CheckOptions = Field(default_factory=CheckOptions)
    sweep: Optional[SweepSpec] = None
    output: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    seed: int = Field(default_factory=lambda: settings.SEED)

    @model_validator(mode="after")
    def check_dimension(self) -> "ExperimentConfig":
        if self.dim > settings.MAX_EXACT_DIM:
            raise ValueError(f"dim {self.dim} exceeds the exact-operation cap {settings.MAX_EXACT_DIM}")
        numeric = QUADRATURE_CHECKS.intersection(self.checks)
        if numeric and self.dim > settings.MAX_QUADRATURE_DIM:
            raise ValueError(
                f"dim {self.dim} exceeds the quadrature cap {settings.MAX_QUADRATURE_DIM} "
                f"required by {sorted(c.value for c in numeric)}"
            )
        if CheckName.PROP8 in self.checks and self.dim > 3:
            raise ValueError("prop8 is limited to dim <= 3")
        if numeric and not self.measures:
            raise ValueError("measure-based checks need at least one measure")
        return self
