"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConditioningError(ArithmeticError):
    """A closed form would lose too many significant digits to be trusted."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""
