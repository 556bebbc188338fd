"""Exception hierarchy shared by every module of the package."""


class RotBecError(Exception):
    """Base class for all package errors."""


class DomainError(RotBecError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(RotBecError, RuntimeError):
    """An iterative procedure did not reach its tolerance.

    ``residuals`` carries the last residual vector (or ``None``) and
    ``iterations`` the number of iterations spent.
    """

    def __init__(self, message, residuals=None, iterations=None):
        super().__init__(message)
        self.residuals = residuals
        self.iterations = iterations


class UnstableRegimeError(RotBecError, ValueError):
    """The stationary-state closure breaks down (zeta <= 0 or negative frequencies)."""


class NotFoundError(RotBecError, LookupError):
    """A searched-for root, bracket or bifurcation does not exist in the window."""


class CapabilityError(RotBecError, ValueError):
    """The request exceeds a supported maximum (e.g. polynomial degree)."""


class PreconditionError(RotBecError, ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class NumericError(RotBecError, ArithmeticError):
    """A numerical kernel failed (eigensolver, non-monotone relaxation, drift)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
