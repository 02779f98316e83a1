"""Exception types raised by convexcr."""


class ConvexCRError(Exception):
    """Base class for all library errors."""


class InvalidInput(ConvexCRError, ValueError):
    """Input rejected before any computation (CLI exit code 2)."""


class DimensionMismatch(InvalidInput):
    pass


class BadDimension(InvalidInput):
    pass


class DegenerateInput(InvalidInput):
    pass


class ZeroDirection(InvalidInput):
    pass


class BadRadius(InvalidInput):
    pass


class ResolutionTooCoarse(InvalidInput):
    pass


class NotOnBoundary(InvalidInput):
    pass


class ONotOnBoundary(NotOnBoundary):
    pass


class PointCoincidesWithO(InvalidInput):
    pass


class PointIsO(PointCoincidesWithO):
    pass


class NonuniformRadius(InvalidInput):
    pass


class NoCriticalPoints(ConvexCRError, RuntimeError):
    """Internal invariant violation: a compact body always has a critical point."""


class NoWitness(ConvexCRError):
    """The point is critical, so no outward direction into the body exists."""


class StalledAtCritical(ConvexCRError):
    """A level push ran into a critical point before reaching its target radius.

    Attributes
    ----------
    radius : float
        Radius at which the push was blocked.
    critical_point : numpy.ndarray or None
        The blocking critical point, when known.
    indices : list of int
        Input points whose trajectories are blocked.
    """

    def __init__(self, message, radius=None, critical_point=None, indices=()):
        super().__init__(message)
        self.radius = radius
        self.critical_point = critical_point
        self.indices = list(indices)
