"""Price/return series containers and tick-grid coarse-graining.

Returns are additive throughout: r[i] = p[i+1] - p[i], so integrating a
return series from its initial price reconstructs the price path.  Prices
are coarse-grained onto a tick grid by flooring to integer multiples of
the tick size.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .errors import InsufficientDataError, ParameterError
from .validation import as_float_array, check_min_length, check_positive

# Relative guard added to price/delta before flooring, so prices that sit
# exactly on a grid line map to their own cell despite binary rounding
# (1.00/0.05 evaluates to 19.999999999999996 in doubles).
GRID_GUARD = 1e-9


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PriceSeries:
    """Price levels at non-decreasing instants.

    When ``timestamps`` is omitted the series is in event-index mode and
    timestamps default to 0..n-1.  Explicit timestamps must be strictly
    increasing (wall-clock mode).
    """

    prices: np.ndarray
    timestamps: np.ndarray | None = None

    def __post_init__(self):
        prices = _frozen(as_float_array(self.prices, "prices"))
        object.__setattr__(self, "prices", prices)
        if self.timestamps is None:
            ts = _frozen(np.arange(prices.size))
        else:
            ts = _frozen(as_float_array(self.timestamps, "timestamps"))
            if ts.size != prices.size:
                raise ParameterError("timestamps and prices must have equal length")
            if ts.size > 1 and np.any(np.diff(ts) <= 0):
                raise ParameterError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", ts)

    def __len__(self):
        return self.prices.size


@dataclass(frozen=True)
class ReturnSeries:
    """Additive return increments, optionally tagged with interval labels."""

    values: np.ndarray
    bin_labels: np.ndarray | None = None

    def __post_init__(self):
        values = _frozen(as_float_array(self.values, "values"))
        object.__setattr__(self, "values", values)
        if self.bin_labels is not None:
            labels = np.asarray(self.bin_labels)
            if labels.shape != values.shape:
                raise ParameterError("bin_labels must match values in length")
            labels = labels.copy()
            labels.setflags(write=False)
            object.__setattr__(self, "bin_labels", labels)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class TickGrid:
    """The grid of integer multiples of the tick size ``delta``."""

    delta: float

    def __post_init__(self):
        check_positive(self.delta, "delta")
        object.__setattr__(self, "delta", float(self.delta))

    def index(self, prices):
        """Grid cell index floor(price / delta), with a relative guard."""
        prices = np.asarray(prices, dtype=np.float64)
        return np.floor(prices / self.delta + GRID_GUARD)

    def snap(self, prices):
        """Coarse-grain prices to the grid: floor(price / delta) * delta."""
        return self.index(prices) * self.delta


def returns(p: PriceSeries) -> ReturnSeries:
    """Consecutive additive price differences; length is len(p) - 1."""
    check_min_length(p.prices, 2, "price series")
    return ReturnSeries(np.diff(p.prices))


def integrate(r: ReturnSeries, initial: float) -> PriceSeries:
    """Cumulative sum of returns starting from ``initial``."""
    initial = float(initial)
    if not np.isfinite(initial):
        raise ParameterError(f"initial price must be finite, got {initial!r}")
    values = as_float_array(getattr(r, "values", r), "returns")
    prices = np.empty(values.size + 1)
    prices[0] = initial
    np.cumsum(values, out=prices[1:])
    prices[1:] += initial
    return PriceSeries(prices)


def discretize(p: PriceSeries, grid: TickGrid) -> PriceSeries:
    """Observed prices on the tick grid; timestamps are unchanged."""
    if not isinstance(grid, TickGrid):
        grid = TickGrid(grid)
    return PriceSeries(grid.snap(p.prices), p.timestamps)


class TickDiscretizer(TransformerMixin, BaseEstimator):
    """Transformer that floors prices to integer multiples of a tick size.

    Stateless apart from parameter validation; ``transform`` accepts
    arrays of any shape and coarse-grains them elementwise.
    """

    def __init__(self, delta=0.01):
        self.delta = delta

    def fit(self, X, y=None):
        self.grid_ = TickGrid(self.delta)
        return self

    def transform(self, X):
        if not hasattr(self, "grid_"):
            raise NotFittedError("TickDiscretizer must be fitted before transform")
        X = np.asarray(X, dtype=np.float64)
        if X.size and not np.all(np.isfinite(X)):
            raise ParameterError("prices contain non-finite values")
        return self.grid_.snap(X)
