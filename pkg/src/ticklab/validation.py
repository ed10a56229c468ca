"""Input-validation helpers shared by the containers and estimators."""
import numpy as np

from .errors import InsufficientDataError, ParameterError


def as_float_array(x, name="array"):
    """Coerce to a 1-d float64 array, rejecting non-finite entries."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite values")
    return arr


def series_values(x, name="series"):
    """Accept a ReturnSeries, a pandas object, or a plain sequence of values."""
    return as_float_array(getattr(x, "values", x), name=name)


def check_min_length(arr, n, name="series"):
    if len(arr) < n:
        raise InsufficientDataError(
            f"{name} needs at least {n} observations, got {len(arr)}"
        )


def check_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be positive and finite, got {value!r}")
