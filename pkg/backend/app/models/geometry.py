"""Immutable representations of symmetric convex bodies."""
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np

from app.core.exceptions import DimensionMismatchError, GeometryError

# Points of R^n are plain float arrays of shape (n,)
Vector = np.ndarray

FiberCallback = Callable[[int, np.ndarray], Optional[Tuple[float, float]]]


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    if array.ndim != ndim:
        raise GeometryError(f"{name} must have {ndim} dimension(s), got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise GeometryError(f"{name} contains non-finite entries")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class HPolytope:
    """
    Body {x : a_i·x <= c_i}.

    Bodies of the library have every offset equal to 1. Slices away from the
    center keep general offsets; `normalized` tells the two apart.
    """
    normals: np.ndarray
    offsets: np.ndarray = None
    symmetric: bool = False

    def __post_init__(self):
        normals = _frozen_array(self.normals, 2, "normals")
        offsets = self.offsets
        if offsets is None:
            offsets = np.ones(normals.shape[0])
        offsets = _frozen_array(offsets, 1, "offsets")
        if offsets.shape[0] != normals.shape[0]:
            raise DimensionMismatchError("one offset per normal is required")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @property
    def dim(self) -> int:
        return int(self.normals.shape[1])

    @property
    def n_facets(self) -> int:
        return int(self.normals.shape[0])

    @property
    def normalized(self) -> bool:
        return bool(np.all(self.offsets == 1.0))

    def __repr__(self) -> str:
        return f"HPolytope(dim={self.dim}, facets={self.n_facets}, symmetric={self.symmetric})"


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of a vertex list."""
    vertices: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen_array(self.vertices, 2, "vertices"))

    @property
    def dim(self) -> int:
        return int(self.vertices.shape[1])

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    def __repr__(self) -> str:
        return f"VPolytope(dim={self.dim}, vertices={self.n_vertices}, symmetric={self.symmetric})"


@dataclass(frozen=True, eq=False)
class BodyOracle:
    """
    Body known through its gauge and an enclosing box.

    `box` has shape (n, 2) with per-axis [lower, upper] bounds. Optional
    callbacks give a vectorized gauge, exact fibers (axis, point) -> interval
    and the gauge of the polar body.
    """
    dim: int
    gauge: Callable[[Vector], float]
    box: np.ndarray
    kind: str = "oracle"
    gauge_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fiber: Optional[FiberCallback] = None
    polar_gauge: Optional[Callable[[Vector], float]] = None
    radius: Optional[float] = None
    parts: Tuple["Body", ...] = field(default_factory=tuple)
    unconditional: bool = False

    def __post_init__(self):
        box = _frozen_array(self.box, 2, "box")
        if box.shape != (self.dim, 2) or np.any(box[:, 0] > box[:, 1]):
            raise GeometryError(f"box must be {self.dim} ordered [lo, hi] pairs")
        object.__setattr__(self, "box", box)

    def __repr__(self) -> str:
        return f"BodyOracle(kind={self.kind!r}, dim={self.dim})"


Body = Union[HPolytope, VPolytope, BodyOracle]
