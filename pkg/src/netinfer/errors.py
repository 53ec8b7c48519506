"""Exception types shared across the package."""


class NetinferError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(NetinferError, ValueError):
    """An argument violates an operation's preconditions."""


class ConvergenceError(NetinferError, RuntimeError):
    """An iterative solver failed to reach its tolerance.

    Carries the final violation (KKT gap for the SVR solver, max
    coefficient delta for coordinate descent).
    """

    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class ComputationError(NetinferError, RuntimeError):
    """A computation produced no usable result (e.g. every candidate failed)."""


class DegenerateDesignError(NetinferError, ValueError):
    """A regression design matrix is rank deficient."""


class ExplosiveSeriesError(NetinferError, RuntimeError):
    """A simulated rollout produced non-finite values.

    ``timepoint`` is the 1-based index of the first bad timepoint.
    """

    def __init__(self, message, timepoint=None):
        super().__init__(message)
        self.timepoint = timepoint


class ParseError(NetinferError, ValueError):
    """A CSV/JSON input could not be parsed; message names the line or field."""
