"""Exception types shared across the package."""


class ConvdualError(Exception):
    """Base class for all package errors."""


class SchemaError(ConvdualError):
    """A problem file or constructor argument violates the data contract."""


class InfeasibleError(ConvdualError):
    """A selection / optimization problem has no feasible point.

    ``node`` carries the witness node index when one is known.
    """

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class BudgetError(ConvdualError):
    """A brute-force oracle was asked to exceed its enumeration budget."""


class ToleranceError(ConvdualError):
    """An internal cross-check failed beyond its tolerance."""
