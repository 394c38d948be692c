"""Exception types raised across the package."""


class PeriABCError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(PeriABCError, ValueError):
    pass


class DegenerateStencilError(PeriABCError, ValueError):
    pass


class UnstableOperatorError(PeriABCError, ValueError):
    """The dispersion symbol is positive somewhere (complex frequencies)."""


class LayoutError(PeriABCError, ValueError):
    pass


class StabilityError(PeriABCError, ValueError):
    """Time step too large for the explicit integrator."""


class SequencingError(PeriABCError, RuntimeError):
    pass


class ConfigurationError(PeriABCError, ValueError):
    pass


class QuadratureError(PeriABCError, RuntimeError):
    pass


class DomainError(PeriABCError, ValueError):
    pass


class PadInsufficientError(PeriABCError, RuntimeError):
    pass


class AbortedRunError(PeriABCError, RuntimeError):
    pass


class FitError(PeriABCError, ValueError):
    pass


class InvalidSourceError(PeriABCError, ValueError):
    pass


class UnknownTableError(PeriABCError, KeyError):
    pass


class ShapeError(PeriABCError, ValueError):
    pass
