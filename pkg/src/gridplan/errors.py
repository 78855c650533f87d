"""Exception types shared across the package."""


class GridplanError(Exception):
    """Base class for all errors raised by this package."""


class DataError(GridplanError):
    """Input data is malformed, inconsistent, or out of range."""


class DimensionError(GridplanError):
    """A model would exceed the size limits of the chosen solve path."""


class InfeasibleError(GridplanError):
    """The linear program has no feasible point.

    Carries an optional certificate: a dual ray proving infeasibility.
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class UnboundedError(GridplanError):
    """The linear program is unbounded below.

    Carries an optional certificate: a feasible ray with negative cost.
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class SolverError(GridplanError):
    """The solver failed for a reason other than infeasible/unbounded."""
