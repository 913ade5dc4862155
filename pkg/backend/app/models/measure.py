"""Log-concave measures and their one-dimensional restrictions."""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from app.core.exceptions import MeasureError
from app.models.geometry import HPolytope

# Log-density over a batch of points: (m, n) -> (m,), -inf for zero density
LogDensity = Callable[[np.ndarray], np.ndarray]
# Draws `size` points from the normalized measure
Sampler = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class MeasureFlags:
    """Declared structural properties, validated by sampling."""
    even: bool
    unconditional: bool
    log_concave_declared: bool = True

    def __post_init__(self):
        if self.unconditional and not self.even:
            raise MeasureError("an unconditional measure is necessarily even")


@dataclass(frozen=True)
class RadialProfile:
    """Closed-form ball measures: isotropic Gaussian (scale = sigma) or box Lebesgue (scale = min half-width)."""
    kind: str
    scale: float


@dataclass(frozen=True, eq=False)
class LogConcaveMeasure:
    """Measure f_mu(x) dx with f_mu stored as its logarithm."""
    dim: int
    log_density: LogDensity
    flags: MeasureFlags
    sampler: Optional[Sampler] = None
    total_mass: Optional[float] = None
    support_box: Optional[np.ndarray] = None
    support: Optional[HPolytope] = None
    radial: Optional[RadialProfile] = None
    measure_id: str = "custom"

    def log_density_at(self, points: np.ndarray) -> np.ndarray:
        """Log-density of one point or a batch of points."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            return self.log_density(points[None, :])
        return self.log_density(points)

    def density_at(self, points: np.ndarray) -> np.ndarray:
        return np.exp(self.log_density_at(points))

    def __repr__(self) -> str:
        return f"LogConcaveMeasure(id={self.measure_id!r}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class FiberMeasure:
    """Restriction of a measure to the line y + R e_axis."""
    base_point: np.ndarray
    axis: int
    log_density_1d: Callable[[np.ndarray], np.ndarray]

    def density(self, t: np.ndarray) -> np.ndarray:
        return np.exp(self.log_density_1d(np.asarray(t, dtype=float)))
