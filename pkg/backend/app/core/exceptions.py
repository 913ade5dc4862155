"""Exception hierarchy."""


class GeometryError(ValueError):
    """Invalid body or failed geometric operation."""


class DimensionMismatchError(GeometryError):
    """Operands live in different dimensions."""


class DegenerateBodyError(GeometryError):
    """Body is empty, lower-dimensional, or has the origin on its boundary."""


class UnboundedBodyError(GeometryError):
    """Halfspace system does not describe a bounded body."""


class NormalizationError(GeometryError):
    """Operation requires offsets normalized to 1."""


class SingularTransformError(GeometryError):
    """Linear map is singular or badly conditioned."""


class InternalSolverError(GeometryError):
    """An LP or hull computation failed where it cannot fail in theory."""


class MeasureError(ValueError):
    """Invalid measure parameters or flags."""


class UnsupportedMeasureError(MeasureError):
    """No closed form available for this measure."""


class ConfigError(ValueError):
    """Invalid experiment configuration or CLI input."""


class MeasureValidationWarning(UserWarning):
    """A sampled check on a declared measure property failed."""
