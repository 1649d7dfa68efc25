"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class NumericalError(ArithmeticError):
    """A numerical routine failed or produced a non-finite value.

    ``params`` carries the offending input (e.g. optimizer parameters) when
    one is available, so that the failure can be reproduced.
    """

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params
