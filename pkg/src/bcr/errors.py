"""Exception types raised across the package."""


class BCRError(Exception):
    """Base class for all solver errors."""


class NotPsd(BCRError):
    """A matrix that must be positive semidefinite is not."""

    def __init__(self, message, label=None):
        super().__init__(message if label is None else f"{label}: {message}")
        self.label = label


class NotSpd(BCRError):
    """Cholesky factorization failed at the requested ridge."""


class NonConvergence(BCRError):
    """An iterative routine missed its tolerance within the iteration cap."""


class NegativeBound(BCRError):
    pass


class RankOutOfRange(BCRError):
    pass


class NoEqualityConstraints(BCRError):
    pass


class ZeroMatrix(BCRError):
    pass


class DegenerateGraph(BCRError):
    pass


class TooLarge(BCRError):
    pass


class Infeasible(BCRError):
    pass
