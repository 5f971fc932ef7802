"""Exception types raised across the package."""


class ThreadingError(Exception):
    """Base class for all package errors."""


class DomainError(ThreadingError):
    """A point lies outside the declared domain of a metric."""


class EvalError(ThreadingError):
    """An expression produced a non-finite or undefined value."""


class SingularMetric(ThreadingError):
    """The spatial metric is degenerate or not positive-definite."""


class UnknownMetric(ThreadingError, KeyError):
    pass


class MissingParam(ThreadingError, KeyError):
    pass


class ParseError(ThreadingError, ValueError):
    pass


class HypothesisViolated(ThreadingError, ValueError):
    """Inputs break a hypothesis of the focusing estimate."""


class NoBlowup(ThreadingError):
    """The expansion stayed bounded on the integration interval."""


class StepFailure(ThreadingError):
    """Adaptive step size underflowed."""


class SpatialGeodesic(ThreadingError):
    """The curve has no 3D arc-length parametrization at this point."""
