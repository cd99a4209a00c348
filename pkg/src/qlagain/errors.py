"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularityError(ArithmeticError):
    """A quantity diverges at the requested point (e.g. K_G at G = 1)."""


class ConvergenceError(RuntimeError):
    """A series, root bracket or finite-difference scheme failed to converge."""


class UnsupportedProbeError(TypeError):
    """The probe variant is not supported by the requested operation."""
