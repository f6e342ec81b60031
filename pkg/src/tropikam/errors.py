"""Exception types shared across the package."""


class TropikamError(Exception):
    """Base class for all package errors."""


class DimensionError(TropikamError, ValueError):
    """Operands have incompatible shapes."""


class KernelFormatError(TropikamError, ValueError):
    """A cost file or kernel payload could not be parsed or validated."""


class NormalizationError(TropikamError, ValueError):
    """An operation required a normalized kernel (zero minimum cycle mean)."""


class LipschitzError(TropikamError, ValueError):
    """A potential violates the Lipschitz bound required by an operation.

    Carries the worst violating pair so callers can report it.
    """

    def __init__(self, message, pair=None, violation=None):
        super().__init__(message)
        self.pair = pair
        self.violation = violation


class InconsistencyError(TropikamError, RuntimeError):
    """Numerically derived data contradicts a structural guarantee.

    Raised e.g. when the Aubry set thresholds to empty, or a successor
    that must exist cannot be found within tolerance.  Signals a bad
    normalization or unsuitable tolerances rather than a usage error.
    """
