"""Pydantic schema for body files."""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator


class BodyKind(str, Enum):
    """Stored body representation."""
    HPOLY = "hpoly"
    VPOLY = "vpoly"
    BALL = "ball"
    COMPOSITE = "oracle-composite"


class BodyDocument(BaseModel):
    """
    One body per document.

    `rows` holds normals for hpoly and vertices for vpoly. `offsets` is only
    present for general-offset slices. A composite body is the intersection of
    its `parts`.
    """
    dim: int = Field(ge=1)
    kind: BodyKind
    rows: List[List[float]] = Field(default_factory=list)
    offsets: Optional[List[float]] = None
    radius: Optional[float] = Field(default=None, gt=0)
    parts: List["BodyDocument"] = Field(default_factory=list)
    symmetric: Optional[bool] = None
    body_id: Optional[str] = None

    @model_validator(mode="after")
    def check_shape(self) -> "BodyDocument":
        if self.kind in (BodyKind.HPOLY, BodyKind.VPOLY):
            if not self.rows:
                raise ValueError(f"{self.kind.value} body needs rows")
            if any(len(row) != self.dim for row in self.rows):
                raise ValueError(f"every row must have {self.dim} entries")
            if self.offsets is not None and len(self.offsets) != len(self.rows):
                raise ValueError("one offset per row is required")
        elif self.kind == BodyKind.BALL:
            if self.radius is None:
                raise ValueError("ball body needs a radius")
        elif not self.parts:
            raise ValueError("composite body needs parts")
        elif any(part.dim != self.dim for part in self.parts):
            raise ValueError("composite parts must share the body dimension")
        return self


BodyDocument.model_rebuild()
