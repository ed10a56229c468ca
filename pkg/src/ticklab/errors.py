"""Exception types shared across the package."""


class TickLabError(Exception):
    """Base class for all ticklab errors."""


class ParameterError(TickLabError, ValueError):
    """A parameter or input value is outside its allowed range."""


class InsufficientDataError(TickLabError, ValueError):
    """Too few observations for the requested computation."""


class DegenerateDataError(TickLabError, ArithmeticError):
    """Input on which the requested statistic is undefined."""


class ZeroVarianceError(DegenerateDataError):
    """Constant series: correlation-type estimators are undefined."""


class DegenerateTailError(DegenerateDataError):
    """All tail magnitudes coincide: the tail exponent is undefined."""


class SchemaError(TickLabError):
    """Input file does not conform to the declared schema."""


class PanelMismatchError(TickLabError, KeyError):
    """Before/after windows do not cover the same instruments."""


class ConfigError(TickLabError):
    """Experiment configuration is missing or invalid."""


class InternalConsistencyError(TickLabError, RuntimeError):
    """An internal invariant was violated."""
