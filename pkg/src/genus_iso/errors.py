"""Exception types shared across the package."""


class GenusIsoError(Exception):
    """Base class for all errors raised by this package."""


class SegmentLengthOdd(GenusIsoError):
    pass


class PerimeterMismatch(GenusIsoError):
    pass


class BoundaryEdgeForbidden(GenusIsoError):
    pass


class NonUnitEdge(GenusIsoError):
    pass


class OutOfBounds(GenusIsoError):
    pass


class InfeasibleDensity(GenusIsoError):
    pass


class OddCycle(GenusIsoError):
    pass


class EdgeNotOnCycle(GenusIsoError):
    pass


class BudgetExceeded(GenusIsoError):
    pass


class PreconditionOddCrossing(GenusIsoError):
    pass


class PreconditionViolated(GenusIsoError):
    pass


class UnbalancedClasses(GenusIsoError):
    pass


class NotPerfect(GenusIsoError):
    pass


class PatternNotFound(GenusIsoError):
    pass


class WeightBaseTooSmall(GenusIsoError):
    pass
