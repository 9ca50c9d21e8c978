"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class NumericalError(ArithmeticError):
    """An iterative routine failed to converge or hit a singular solve."""
