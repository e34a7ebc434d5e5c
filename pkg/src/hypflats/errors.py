"""Exception hierarchy shared across the package."""


class HypflatsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HypflatsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CurvatureModeError(DomainError):
    """A hyperbolic-only operation was called with curvature K >= 0."""


class RankError(HypflatsError, ValueError):
    """Input vectors are rank deficient below the requested tolerance."""


class ConstructionError(HypflatsError, ValueError):
    """A geometric object could not be constructed from the given data."""


class QuadratureError(HypflatsError, ArithmeticError):
    """Numerical integration failed to converge.

    Carries the best available partial result so callers can inspect how
    far the integrator got.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ProbabilityRangeError(HypflatsError, ArithmeticError):
    """A computed probability left [0, 1] by more than its error estimate."""
