"""Exception and warning types raised by pbphase."""


class PBPhaseError(Exception):
    """Base class for all pbphase errors."""


class TruncationError(PBPhaseError):
    """The number-basis cutoff hit ``hard_max_terms`` before the tail tolerance."""

    def __init__(self, message, terms_used=None, tail=None):
        super().__init__(message)
        self.terms_used = terms_used
        self.tail = tail


class ConvergenceError(PBPhaseError):
    """An iterative quadrature refinement stalled."""

    def __init__(self, message, levels=None, estimate=None, error=None):
        super().__init__(message)
        self.levels = levels
        self.estimate = estimate
        self.error = error


class ConsistencyError(PBPhaseError):
    """Two independent evaluation routes disagree beyond tolerance."""


class DimensionTooLargeError(PBPhaseError):
    """Requested finite-s operator is too large for the validation oracle."""


class ExperimentParseError(PBPhaseError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ExperimentValidationError(PBPhaseError):
    pass


class DoubleAdjustError(PBPhaseError):
    pass


class UnsupportedFigureError(PBPhaseError):
    pass


class OverlayMismatchError(PBPhaseError):
    pass


class RegimeWarning(UserWarning):
    """An approximation is used outside the regime where it is justified."""


class ConsistencyWarning(UserWarning):
    """An approximation disagrees with the exact value beyond its expected band."""
