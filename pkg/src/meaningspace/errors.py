"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data or arguments violate a precondition."""


class NumericalError(ArithmeticError):
    """A numerical routine failed (non-convergence, indefinite matrix)."""
