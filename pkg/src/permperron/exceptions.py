"""Exception and warning types raised across the package."""


class PermPerronError(Exception):
    """Base class for all errors raised by permperron."""


class MatrixFormatError(PermPerronError, ValueError):
    """A matrix is malformed: not square, negative, NaN/inf, or unparsable."""


class DimensionMismatch(PermPerronError, ValueError):
    pass


class NoConvergence(PermPerronError):
    """The eigensolver hit ``max_iter`` before meeting its tolerance.

    The last iterate is kept on the exception so callers can inspect it.
    """

    def __init__(self, message, rho=None, x=None, residual=None, iterations=None):
        super().__init__(message)
        self.rho = rho
        self.x = x
        self.residual = residual
        self.iterations = iterations


class NonPositiveVector(PermPerronError, ValueError):
    pass


class DimensionTooLarge(PermPerronError, ValueError):
    pass


class PreconditionFailed(PermPerronError, ValueError):
    pass


class ResidualTooLarge(PermPerronError, ValueError):
    pass


class InvariantViolation(PermPerronError, AssertionError):
    """A mathematically guaranteed inequality failed numerically.

    This always indicates a bug in the implementation or a tolerance set too
    tight for the input scale.
    """


class ReducibleWarning(UserWarning):
    """Perron vector of a reducible matrix may have zeros or be non-unique."""


class LoopLimitWarning(UserWarning):
    pass


class LoopCountWarning(UserWarning):
    """Observed while-loop count exceeded the soft expectation."""
