"""Exception types shared across the package."""


class CsdoaError(Exception):
    """Base class for all csdoa errors."""


class NonPositiveStepError(CsdoaError, ValueError):
    """Grid step must be strictly positive."""


class EmptyGridError(CsdoaError, ValueError):
    """Grid start lies beyond its stop."""


class AngleOutOfRangeError(CsdoaError, ValueError):
    """Angle outside the supported [-90, 90] degree range."""


class OffGridSourceError(CsdoaError, ValueError):
    """Source direction does not coincide with any grid angle."""


class DimensionMismatchError(CsdoaError, ValueError):
    """Operand shapes are incompatible."""


class RankDeficientError(CsdoaError, ArithmeticError):
    """Selected columns are numerically rank deficient."""


class InstanceTooLargeError(CsdoaError, ValueError):
    """Exhaustive search would exceed the enumeration guard."""
