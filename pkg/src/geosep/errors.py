"""Exception types shared across the package."""


class GeosepError(Exception):
    """Base class for all package errors."""


class ValidationError(GeosepError, ValueError):
    """Bad input: malformed file, invalid parameter, kind/dimension mismatch."""


class SeparatorFailure(GeosepError, RuntimeError):
    """A randomized separator round exhausted its retry budget.

    This is a probabilistic outcome, not a bug; callers surface it as an
    explicit failure result rather than an invalid separator.
    """

    def __init__(self, message: str, round_index: int = -1, retries: int = 0):
        super().__init__(message)
        self.round_index = round_index
        self.retries = retries


class InternalConsistencyError(GeosepError, RuntimeError):
    """An invariant that should hold by construction was violated.

    Indicates mis-derived constants or an implementation bug, never a
    recoverable runtime state.
    """
