"""Exception hierarchy shared by all hcgibbs modules."""


class HCGibbsError(Exception):
    """Base class for every error raised by hcgibbs."""


class DomainError(HCGibbsError, ValueError):
    """An argument lies outside the domain of the operation."""


class DivergenceError(HCGibbsError, ArithmeticError):
    """A series that was expected to converge does not close."""


class NumericalError(HCGibbsError, ArithmeticError):
    """A numerical procedure failed to meet its guarantee."""


class FixedPointScanError(NumericalError):
    """The fixed-point scan found the wrong number of roots.

    ``trace`` holds the scan grid, the sampled values and the roots found,
    so the failure can be inspected offline.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or {}


class TruncationError(HCGibbsError, ValueError):
    """The truncation level is too small for the requested tolerance."""

    def __init__(self, message, required_N):
        super().__init__(message)
        self.required_N = required_N
