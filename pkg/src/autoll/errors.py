"""Exception and warning types shared across the package."""


class AutollError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(AutollError):
    """A parameter or configuration value is invalid."""


class ShapeError(AutollError):
    """Array dimensions do not match what an operation requires."""


class DegenerateInputError(AutollError):
    """Input is too degenerate to process (e.g. a constant matrix)."""


class ConvergenceError(AutollError):
    """An iterative solver failed to converge.

    Carries the final residual so callers can judge how close it got.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ParseError(AutollError):
    """A data file could not be parsed. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class CheckpointError(AutollError):
    """A model checkpoint is corrupt or has an unsupported version."""


class DegenerateFeaturesWarning(UserWarning):
    """Extracted node features (or scores) carry no usable ordering signal."""
