"""Return-distribution and volatility-clustering estimators.

Estimators follow the scikit-learn protocol: hyper-parameters are set in
``__init__`` and data-dependent results land in fitted attributes with a
trailing underscore.  Inputs are 1-d return arrays; anything with a
``.values`` attribute (ReturnSeries, pandas objects) is accepted too.
Module-level functions construct, fit, and return the estimator in one
call for pipeline use.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator

from .errors import (
    DegenerateTailError,
    InsufficientDataError,
    ParameterError,
    ZeroVarianceError,
)
from .validation import check_min_length, series_values


class EmpiricalCcdf(BaseEstimator):
    """Complementary CDF of absolute returns, P(|r| >= x).

    Parameters
    ----------
    thresholds : array-like of positive sorted reals, optional
        Evaluation points.  Default: the sorted distinct nonzero |r|.

    Fitted attributes: ``thresholds_``, ``probabilities_`` (non-increasing,
    in [0, 1]) and ``n_``.
    """

    def __init__(self, thresholds=None):
        self.thresholds = thresholds

    def fit(self, X, y=None):
        x = series_values(X)
        check_min_length(x, 1, "return series")
        abs_x = np.sort(np.abs(x))
        if self.thresholds is None:
            thresholds = np.unique(abs_x[abs_x > 0])
            if thresholds.size == 0:
                # all-zero series still has a well-defined (empty) tail
                thresholds = np.array([1.0])
        else:
            thresholds = series_values(self.thresholds, "thresholds")
            if thresholds.size == 0:
                raise ParameterError("thresholds must be non-empty")
            if np.any(thresholds <= 0):
                raise ParameterError("thresholds must be positive")
            if np.any(np.diff(thresholds) < 0):
                raise ParameterError("thresholds must be sorted ascending")
        # P(|r| >= t) via binary search on the sorted magnitudes
        below = np.searchsorted(abs_x, thresholds, side="left")
        self.thresholds_ = thresholds
        self.probabilities_ = 1.0 - below / abs_x.size
        self.n_ = abs_x.size
        return self


class ZeroReturnFrequency(BaseEstimator):
    """Fraction of exactly-zero returns ("stickiness" of the price).

    Zero means exactly zero: on tick-grid prices equal levels subtract to
    0.0, so no tolerance is involved.  Fitted: ``p0_``, ``n_``.
    """

    def fit(self, X, y=None):
        x = series_values(X)
        check_min_length(x, 1, "return series")
        self.n_ = x.size
        self.p0_ = float(np.count_nonzero(x == 0.0)) / x.size
        return self


class HillEstimator(BaseEstimator):
    """Hill estimator of the tail exponent of |returns|.

    Uses the k largest magnitudes, k = max(10, ceil(tail_fraction * m))
    where m counts the nonzero magnitudes (zeros are not tail
    observations and are excluded):

        alpha_h = k / sum_{i=1..k} log(x_(i) / x_(k+1))

    with x_(1) >= x_(2) >= ... the descending order statistics.  The 95%
    confidence half-width is the asymptotic 1.96 * alpha_h / sqrt(k).

    Fitted attributes: ``alpha_h_``, ``k_tail_``, ``ci95_``, ``threshold_``.
    """

    def __init__(self, tail_fraction=0.05):
        self.tail_fraction = tail_fraction

    def fit(self, X, y=None):
        if not 0 < self.tail_fraction <= 0.2:
            raise ParameterError(
                f"tail_fraction must lie in (0, 0.2], got {self.tail_fraction!r}"
            )
        x = series_values(X)
        mags = np.abs(x)
        mags = mags[mags > 0]
        if mags.size < 100:
            raise InsufficientDataError(
                f"Hill estimation needs >= 100 nonzero magnitudes, got {mags.size}"
            )
        k = max(10, math.ceil(self.tail_fraction * mags.size))
        order = np.sort(mags)[::-1]
        top, threshold = order[:k], order[k]
        log_excess = np.log(top / threshold)
        denom = log_excess.sum()
        if denom <= 0:
            raise DegenerateTailError("tail magnitudes are all equal")
        self.alpha_h_ = k / denom
        self.k_tail_ = k
        self.threshold_ = float(threshold)
        self.ci95_ = 1.96 * self.alpha_h_ / math.sqrt(k)
        return self


class AcfEstimator(BaseEstimator):
    """Sample autocorrelation for lags 1..max_lag.

    Biased ("full sample") convention: grand mean and full-series variance
    in the denominator, which keeps the estimate variance-stable across
    lags:

        rho(k) = sum_t (x_t - xbar)(x_{t+k} - xbar) / sum_t (x_t - xbar)^2

    Fitted attributes: ``lags_``, ``rho_``.
    """

    def __init__(self, max_lag=20):
        self.max_lag = max_lag

    def fit(self, X, y=None):
        if self.max_lag < 1:
            raise ParameterError(f"max_lag must be >= 1, got {self.max_lag!r}")
        x = series_values(X)
        if x.size <= 4 * self.max_lag:
            raise InsufficientDataError(
                f"ACF up to lag {self.max_lag} needs more than {4 * self.max_lag} "
                f"observations, got {x.size}"
            )
        xc = x - x.mean()
        denom = float(xc @ xc)
        if denom == 0.0:
            raise ZeroVarianceError("constant series has no autocorrelation")
        rho = np.empty(self.max_lag)
        for k in range(1, self.max_lag + 1):
            rho[k - 1] = float(xc[:-k] @ xc[k:]) / denom
        self.lags_ = np.arange(1, self.max_lag + 1)
        self.rho_ = rho
        return self


class DfaHurst(BaseEstimator):
    """Hurst exponent via order-1 detrended fluctuation analysis.

    The mean-centred series is integrated to a profile.  For each window
    size s the profile is split into non-overlapping windows, each window
    is detrended by a least-squares line, and F(s) is the RMS residual.
    The Hurst estimate is the slope of log F(s) against log s.

    Window sizes are n_windows log-spaced integers in
    [min_window, max_window]; max_window defaults to n // 8.

    Fitted attributes: ``hurst_``, ``window_sizes_``, ``fluctuation_``,
    ``fit_stderr_``.
    """

    def __init__(self, min_window=16, max_window=None, n_windows=10):
        self.min_window = min_window
        self.max_window = max_window
        self.n_windows = n_windows

    def fit(self, X, y=None):
        if self.min_window < 4:
            raise ParameterError(f"min_window must be >= 4, got {self.min_window!r}")
        if self.n_windows < 4:
            raise ParameterError(f"n_windows must be >= 4, got {self.n_windows!r}")
        x = series_values(X)
        max_window = self.max_window if self.max_window is not None else x.size // 8
        if max_window < self.min_window:
            raise InsufficientDataError(
                f"series of length {x.size} is too short for min_window "
                f"{self.min_window}"
            )
        if x.size < 4 * max_window:
            raise InsufficientDataError(
                f"series of length {x.size} is too short for max_window {max_window}"
            )
        scales = np.unique(
            np.rint(
                np.geomspace(self.min_window, max_window, self.n_windows)
            ).astype(int)
        )
        if scales.size < 4:
            raise InsufficientDataError(
                "fewer than 4 distinct window sizes; widen the window range"
            )

        profile = np.cumsum(x - x.mean())
        fluctuation = np.empty(scales.size)
        for i, s in enumerate(scales):
            m = profile.size // s
            seg = profile[: m * s].reshape(m, s)
            t = np.arange(s) - (s - 1) / 2.0
            slope = (seg @ t) / (t @ t)
            resid = seg - seg.mean(axis=1, keepdims=True) - slope[:, None] * t
            fluctuation[i] = math.sqrt(float(np.mean(resid * resid)))
        if np.any(fluctuation == 0.0):
            raise ZeroVarianceError("constant series has no fluctuation to detrend")

        fit = stats.linregress(np.log(scales), np.log(fluctuation))
        self.hurst_ = float(fit.slope)
        self.fit_stderr_ = float(fit.stderr)
        self.window_sizes_ = scales
        self.fluctuation_ = fluctuation
        return self


def ccdf(r, thresholds=None) -> EmpiricalCcdf:
    return EmpiricalCcdf(thresholds=thresholds).fit(r)


def zero_frequency(r) -> ZeroReturnFrequency:
    return ZeroReturnFrequency().fit(r)


def hill(r, tail_fraction=0.05) -> HillEstimator:
    return HillEstimator(tail_fraction=tail_fraction).fit(r)


def acf(r, max_lag=20) -> AcfEstimator:
    return AcfEstimator(max_lag=max_lag).fit(r)


def dfa_hurst(r, min_window=16, max_window=None, n_windows=10) -> DfaHurst:
    return DfaHurst(
        min_window=min_window, max_window=max_window, n_windows=n_windows
    ).fit(r)
