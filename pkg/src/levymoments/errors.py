"""Exception types shared across the package."""


class LevyMomentsError(Exception):
    """Base class for all package errors."""


class DomainError(LevyMomentsError):
    """Evaluation requested outside the analytic domain or theorem strip."""


class RangeError(LevyMomentsError):
    """Argument outside the admissible range of a real-valued map."""


class PoleError(LevyMomentsError):
    """Evaluation at a pole (Gamma at non-positive integers, W at its poles)."""


class QuadratureError(LevyMomentsError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ConvergenceError(LevyMomentsError):
    """An iterative limit or series failed to converge within its budget."""


class RootError(LevyMomentsError):
    """Root bracketing or refinement failed."""


class GridError(LevyMomentsError):
    """Requested point lies outside a tabulated grid's span."""


class SingularityError(LevyMomentsError):
    """Endpoint singularity too strong to integrate (exponent <= -1)."""


class OverflowGuardError(LevyMomentsError):
    """A log-space magnitude exceeded the configured exponentiation cap.

    Carries the log-scale representation so the caller can still reason
    about the term.
    """

    def __init__(self, message, log_modulus=None, argument=None):
        super().__init__(message)
        self.log_modulus = log_modulus
        self.argument = argument
