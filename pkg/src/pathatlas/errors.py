"""Exception hierarchy shared by all pathatlas modules."""


class PathAtlasError(Exception):
    """Base class for all library errors."""


class DomainError(PathAtlasError):
    """An argument lies outside the domain of a curve or interval."""


class OrderError(PathAtlasError):
    """A derivative order higher than the curve supports was requested."""


class DimensionError(PathAtlasError):
    """Vector or matrix shapes are incompatible."""


class MonotonicityError(PathAtlasError):
    """A scalar reparametrization lacks a strict-monotonicity certificate."""


class BudgetError(PathAtlasError):
    """A certified tolerance could not be met within the resource budget."""


class ChartError(PathAtlasError):
    """A point is not representable in the requested chart."""


class CoverageError(PathAtlasError):
    """A path escapes the chart cover it is supposed to stay in.

    Carries the first offending time when known.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NotInteriorError(PathAtlasError):
    """A path touches the boundary of its chart cover; no positive margin exists."""
