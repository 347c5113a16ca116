"""Exception hierarchy shared by all rspeckle modules.

Each CLI error class maps to a distinct nonzero exit code (see cli.EXIT_CODES).
"""


class SpeckleError(Exception):
    """Base class for all toolkit errors."""


class FormatError(SpeckleError):
    """A file header or field is malformed."""


class TruncationError(SpeckleError):
    """Payload size disagrees with the header."""


class DimensionError(SpeckleError):
    """Grid sizes are incompatible with the requested operation."""


class ResolutionError(SpeckleError):
    """A physical length cannot be represented on the sampling grid."""


class RangeError(SpeckleError):
    """A parameter range is empty or out of its sanity band."""


class InputError(SpeckleError):
    """Missing or unusable input data."""


class SelectionError(SpeckleError):
    """Sub-region selection could not place the requested windows."""

    def __init__(self, message, placed=0, requested=0):
        super().__init__(message)
        self.placed = placed
        self.requested = requested


class DegenerateInputError(SpeckleError):
    """Input carries no usable signal (flat, zero-mean, all-background)."""


class NumericalFailureError(SpeckleError):
    """A non-finite value appeared during iteration."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class ConfigurationError(SpeckleError):
    """Pipeline configuration is invalid; message names the field."""
