"""Exception types raised across the package."""


class RankCapraError(Exception):
    """Base class for all errors raised by rankcapra."""


class InputError(RankCapraError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedSourceError(InputError):
    """The requested evaluation path does not exist for this source norm."""


class NumericalError(RankCapraError, ArithmeticError):
    """An iterative routine failed to converge within its budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
