"""Exception hierarchy shared by all modules."""


class EntropicCVError(Exception):
    """Base class for library errors."""


class InvalidInputError(EntropicCVError, ValueError):
    pass


class CapacityError(EntropicCVError):
    """A Fock cutoff would exceed the configured hard cap."""


class GridCoverageError(EntropicCVError):
    """The quadrature grid does not hold the state's probability mass."""


class UnsupportedStateError(EntropicCVError):
    pass


class UnsupportedAngleError(EntropicCVError):
    pass


class NumericalConsistencyError(EntropicCVError):
    pass


class ConvergenceError(EntropicCVError):
    """Grid refinement hit its cap before the entropy settled.

    ``estimates`` holds the last two estimates so callers can inspect the drift.
    """

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)
