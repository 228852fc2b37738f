"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(ArithmeticError):
    """An iterative method exhausted its iteration budget.

    ``bracket`` carries the best known enclosure of the root when one exists.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class TruncationError(ConvergenceError):
    """A series hit its term cap before meeting the tail tolerance."""
