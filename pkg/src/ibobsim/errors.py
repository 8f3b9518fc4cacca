"""Exception types shared across the package.

Every error raised deliberately by ibobsim derives from IbobError so the
CLI can turn any of them into a single machine-readable stderr line.
Plain ValueError is still used for ordinary argument validation.
"""


class IbobError(Exception):
    """Base class for errors raised by ibobsim."""


class NumericDomainError(IbobError, ValueError):
    """A computation left its numeric domain (non-finite intermediate)."""


class TissueFileError(IbobError, ValueError):
    """Tissue parameter file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceError(IbobError, RuntimeError):
    """A configured resource budget (e.g. voxel count) was exceeded."""


class PlacementError(IbobError, ValueError):
    """A coupler could not be placed on the voxel grid."""


class SetupError(IbobError, ValueError):
    """Solver input is structurally incomplete (e.g. no electrodes)."""


class ConvergenceError(IbobError, RuntimeError):
    """Iterative solve did not reach the residual target."""

    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class ProbeError(IbobError, ValueError):
    """Voltage probe region is invalid for the solved field."""


class ModelDomainError(IbobError, ValueError):
    """Requested operating point lies outside a model's validity range."""


class ExtrapolationError(IbobError, ValueError):
    """Requested evaluation point lies outside the sampled range."""


class PairingError(IbobError, ValueError):
    """Curves or reports do not form a valid comparison pair/set."""


class ConfigError(IbobError, ValueError):
    """Run configuration file is invalid."""


class CsvFormatError(IbobError, ValueError):
    """Path-loss CSV is malformed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CsvMonotonicityError(CsvFormatError):
    """Distances in a path-loss CSV are not strictly increasing."""


class CsvValueError(CsvFormatError):
    """A path-loss CSV field holds a non-finite or out-of-domain value."""


class CsvEmptyError(CsvFormatError):
    """Path-loss CSV contains a header but no data rows."""
