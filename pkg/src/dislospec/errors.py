"""Exception hierarchy shared across the package."""


class DislospecError(Exception):
    """Base class for all package errors."""


class InvalidLabelError(DislospecError, ValueError):
    pass


class InvalidParameterError(DislospecError, ValueError):
    pass


class NumericalError(DislospecError, ArithmeticError):
    pass


class DivergentIntegralError(NumericalError):
    pass


class SingularBasisError(NumericalError):
    """A nonzero coefficient multiplies a divergent radial moment.

    Raised when the basis exponent s is inconsistent with (lam, m).
    """


class DegenerateBasisError(NumericalError):
    pass


class OracleError(NumericalError):
    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class ConvergenceError(NumericalError):
    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)
