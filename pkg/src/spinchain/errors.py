"""Exception types shared across the package.

The CLI maps these onto exit codes: DomainError -> 2, ConvergenceError
and DivergenceError -> 3.
"""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of the operation."""


class ComplexBranchError(DomainError):
    """A square-root branch would leave the real axis (lambda^2 < 4)."""


class ConstraintViolationError(ValueError):
    """A geometric constraint (unit norm, tangency) is violated."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge."""

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


class RootCollisionError(ConvergenceError):
    """A root solver produced coincident roots where distinct ones are required."""


class DivergenceError(RuntimeError):
    """A trajectory left the trusted numerical range."""

    def __init__(self, message: str, z: float):
        super().__init__(message)
        self.z = z
