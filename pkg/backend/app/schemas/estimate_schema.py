"""Pydantic schemas for numeric estimates and verification reports."""
from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, model_validator

from app.utils.file_utils import format_float

# Floor added to every slack so exact ties never fail on rounding
SLACK_FLOOR = 1e-9

REPORT_COLUMNS = [
    "inequality_id", "n", "body_id", "measure_id", "lhs", "lhs_err",
    "rhs", "rhs_err", "margin", "slack", "passed", "seed",
]


class EstimateMethod(str, Enum):
    """How a value was obtained."""
    EXACT = "exact"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


class VolumeEstimate(BaseModel):
    """Measure or volume with an absolute error bound (one standard error for MC)."""
    value: float = Field(ge=0)
    method: EstimateMethod
    err: float = Field(default=0.0, ge=0)
    samples: Optional[int] = None
    seed: Optional[int] = None
    converged: bool = True

    @model_validator(mode="after")
    def exact_has_no_error(self) -> "VolumeEstimate":
        if self.method == EstimateMethod.EXACT and self.err != 0.0:
            raise ValueError("exact estimates carry zero error")
        return self

    @classmethod
    def exact(cls, value: float) -> "VolumeEstimate":
        return cls(value=value, method=EstimateMethod.EXACT)

    def times(self, other: "VolumeEstimate") -> "VolumeEstimate":
        """Product with relative errors added."""
        if EstimateMethod.MONTE_CARLO in (self.method, other.method):
            method = EstimateMethod.MONTE_CARLO
        elif EstimateMethod.QUADRATURE in (self.method, other.method):
            method = EstimateMethod.QUADRATURE
        else:
            method = EstimateMethod.EXACT
        err = self.err * other.value + other.err * self.value
        return VolumeEstimate(
            value=self.value * other.value,
            method=method,
            err=0.0 if method == EstimateMethod.EXACT else err,
            samples=self.samples or other.samples,
            seed=self.seed if self.seed is not None else other.seed,
            converged=self.converged and other.converged
        )

    def squared(self) -> "VolumeEstimate":
        return self.times(self)


class VerificationReport(BaseModel):
    """One checked inequality lhs <= rhs."""
    inequality_id: str
    n: int
    lhs: VolumeEstimate
    rhs: VolumeEstimate
    margin: float
    slack: float
    passed: bool
    body_id: str = ""
    measure_id: str = ""
    seed: Optional[int] = None
    context: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def compare(
        cls,
        inequality_id: str,
        lhs: VolumeEstimate,
        rhs: VolumeEstimate,
        n: int,
        body_id: str = "",
        measure_id: str = "",
        seed: Optional[int] = None,
        context: Optional[Dict[str, Any]] = None
    ) -> "VerificationReport":
        """Build the report; passes iff rhs - lhs >= -(3 (lhs.err + rhs.err) + 1e-9)."""
        margin = rhs.value - lhs.value
        slack = 3.0 * (lhs.err + rhs.err) + SLACK_FLOOR
        return cls(
            inequality_id=inequality_id,
            n=n,
            lhs=lhs,
            rhs=rhs,
            margin=margin,
            slack=slack,
            passed=margin >= -slack,
            body_id=body_id,
            measure_id=measure_id,
            seed=seed,
            context=context or {}
        )

    @property
    def exploratory(self) -> bool:
        return self.inequality_id.startswith("explore_")

    def csv_row(self) -> Dict[str, str]:
        """Report as a CSV row, reals at 17 significant digits."""
        return {
            "inequality_id": self.inequality_id,
            "n": str(self.n),
            "body_id": self.body_id,
            "measure_id": self.measure_id,
            "lhs": format_float(self.lhs.value),
            "lhs_err": format_float(self.lhs.err),
            "rhs": format_float(self.rhs.value),
            "rhs_err": format_float(self.rhs.err),
            "margin": format_float(self.margin),
            "slack": format_float(self.slack),
            "passed": "true" if self.passed else "false",
            "seed": "" if self.seed is None else str(self.seed),
        }

    def sort_key(self):
        return (self.body_id, self.measure_id, self.inequality_id)
