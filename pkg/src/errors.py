"""Exception hierarchy. Validation errors map to exit code 2, numerical errors to 3."""


class CopeError(Exception):
    """Base class for every error raised by copeset."""

    exit_code: int = 1


class CopeValidationError(CopeError, ValueError):
    """Bad input: wrong shapes, malformed files, invalid parameters."""

    exit_code = 2


class GeometryError(CopeValidationError):
    """Two grids that must match do not."""


class InvalidFieldError(CopeValidationError):
    """A field holds non-finite values on masked-in cells."""


class IngestionError(CopeValidationError):
    """A GridStackFile, sidecar CSV or config file could not be read."""


class ConfigError(CopeValidationError):
    """An experiment or analysis configuration is inconsistent."""


class OutputError(CopeValidationError):
    """A result file or figure could not be written."""


class CopeNumericalError(CopeError, ArithmeticError):
    """The numbers do not support the requested computation."""

    exit_code = 3


class DesignError(CopeNumericalError):
    """XᵀX is singular or too ill-conditioned to invert."""

    def __init__(self, message: str, rcond: float | None = None):
        super().__init__(message)
        self.rcond = rcond


class DegenerateVarianceError(CopeNumericalError):
    """σ̂ fell below the floor at some cells while the strict policy is active."""

    def __init__(self, message: str, flagged: int = 0):
        super().__init__(message)
        self.flagged = flagged


class EmptyBoundaryError(CopeNumericalError):
    """The bootstrap region is empty and the whole-domain fallback is disabled."""
