"""Exception types shared across the package."""


class ItspcaError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(ItspcaError, ValueError):
    """An argument violates a documented precondition."""


class RankDeficientError(ItspcaError):
    """A matrix that must have full column rank does not.

    Attributes
    ----------
    detected_rank : int
        Numerical rank found at the documented tolerance.
    iteration : int or None
        Iteration index when raised from inside the fitting loop.
    """

    def __init__(self, message, detected_rank, iteration=None):
        super().__init__(message)
        self.detected_rank = detected_rank
        self.iteration = iteration


class EmptySelectionError(ItspcaError):
    """Variance screening selected no coordinates.

    Carries the screening level actually used and the largest diagonal
    value seen, so callers can retry with a smaller ``alpha``.
    """

    def __init__(self, message, alpha_n, max_diagonal):
        super().__init__(message)
        self.alpha_n = alpha_n
        self.max_diagonal = max_diagonal


class DegenerateGapError(ItspcaError):
    """The eigenvalue gap defining the target subspace is zero."""


class ExperimentFailedError(ItspcaError):
    """Too many replicates of one experiment cell failed."""
