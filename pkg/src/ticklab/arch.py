"""ARCH(1) return paths and the tick coarse-graining experiment.

The generating process is r_t = sigma_t * z_t with
sigma_t^2 = alpha0 + alpha1 * r_{t-1}^2 and z_t i.i.d. standard Gaussian.
Noise is drawn from numpy's PCG64 generator via
``Generator.standard_normal`` (ziggurat algorithm), so a fixed seed fixes
the path bit-for-bit on a given numpy version.

The coarse-graining experiment integrates each return path to a price
path, floors it onto tick grids of increasing size, re-differences, and
reports the absolute-return autocorrelation and the zero-return
frequency per tick size, averaged over independent replicate seeds.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ParameterError, ZeroVarianceError
from .estimators import AcfEstimator, ZeroReturnFrequency
from .series import PriceSeries, ReturnSeries, TickGrid, integrate, returns

DEFAULT_BURN_IN = 1024


@dataclass(frozen=True)
class ArchParams:
    """Parameters of an ARCH(1) simulation.

    alpha1 < 1 guarantees covariance stationarity with stationary
    variance alpha0 / (1 - alpha1).  The first ``burn_in`` samples are
    discarded so the reported path starts near stationarity.
    """

    alpha0: float = 0.1
    alpha1: float = 0.9
    n: int = 2**16
    seed: int = 0
    init_return: float = 0.0
    init_price: float = 0.0
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if not (np.isfinite(self.alpha0) and self.alpha0 > 0):
            raise ParameterError(f"alpha0 must be > 0, got {self.alpha0!r}")
        if not (0 <= self.alpha1 < 1):
            raise ParameterError(
                f"alpha1 must lie in [0, 1) for stationarity, got {self.alpha1!r}"
            )
        if self.n < 2:
            raise ParameterError(f"n must be >= 2, got {self.n!r}")
        if self.burn_in < 0:
            raise ParameterError(f"burn_in must be >= 0, got {self.burn_in!r}")
        if not np.isfinite(self.init_return):
            raise ParameterError("init_return must be finite")
        if not np.isfinite(self.init_price):
            raise ParameterError("init_price must be finite")

    @property
    def stationary_std(self) -> float:
        return math.sqrt(self.alpha0 / (1.0 - self.alpha1))


@dataclass(frozen=True)
class CoarseGrainSweep:
    """Tick sizes to sweep (0 disables discretization) and replicate count."""

    deltas: tuple = (0.0, 0.25, 0.5, 1.0, 2.0)
    max_lag: int = 20
    n_seeds: int = 20

    def __post_init__(self):
        deltas = tuple(float(d) for d in self.deltas)
        if not deltas:
            raise ParameterError("deltas must be non-empty")
        if any(not np.isfinite(d) or d < 0 for d in deltas):
            raise ParameterError("deltas must be finite and >= 0")
        object.__setattr__(self, "deltas", deltas)
        if self.max_lag < 1:
            raise ParameterError(f"max_lag must be >= 1, got {self.max_lag!r}")
        if self.n_seeds < 1:
            raise ParameterError(f"n_seeds must be >= 1, got {self.n_seeds!r}")


def simulate_arch(params: ArchParams) -> ReturnSeries:
    """Simulate one ARCH(1) return path, deterministic per seed."""
    rng = np.random.default_rng(params.seed)
    z = rng.standard_normal(params.n + params.burn_in)
    a0, a1 = params.alpha0, params.alpha1
    r = np.empty(z.size)
    prev = params.init_return
    for t in range(z.size):
        prev = math.sqrt(a0 + a1 * prev * prev) * z[t]
        r[t] = prev
    return ReturnSeries(r[params.burn_in :])


def default_sweep(
    params: ArchParams,
    multiples=(0.0, 0.25, 0.5, 1.0, 2.0),
    max_lag: int = 20,
    n_seeds: int = 20,
) -> CoarseGrainSweep:
    """Sweep with tick sizes set as multiples of the stationary std dev."""
    sigma = params.stationary_std
    return CoarseGrainSweep(
        deltas=tuple(m * sigma for m in multiples), max_lag=max_lag, n_seeds=n_seeds
    )


@dataclass
class CoarseGrainResult:
    """Replicate-averaged output of :func:`coarse_grain_experiment`.

    acf columns: delta, lag, acf, stderr, n_seeds.  Rows for a tick size
    whose every replicate path was flattened to a constant carry NaN and
    n_seeds = 0, and the delta is listed in ``degenerate``.
    zero_freq columns: delta, p0, stderr, n_seeds.
    """

    acf: pd.DataFrame
    zero_freq: pd.DataFrame
    degenerate: tuple


def observed_returns(r: ReturnSeries, delta: float, init_price: float) -> ReturnSeries:
    """Integrate, coarse-grain with tick size delta, and re-difference."""
    prices = integrate(r, init_price)
    if delta > 0:
        prices = PriceSeries(TickGrid(delta).snap(prices.prices), prices.timestamps)
    return returns(prices)


def coarse_grain_experiment(
    params: ArchParams, sweep: CoarseGrainSweep
) -> CoarseGrainResult:
    """Run the tick-size sweep; deterministic for fixed params and sweep.

    Replicate i re-runs the simulation with seed params.seed + i.
    """
    if sweep.max_lag >= params.n:
        raise ParameterError("max_lag must be smaller than the path length")
    n_deltas, n_lags = len(sweep.deltas), sweep.max_lag
    acf_samples = np.full((n_deltas, sweep.n_seeds, n_lags), np.nan)
    p0_samples = np.full((n_deltas, sweep.n_seeds), np.nan)
    estimator = AcfEstimator(max_lag=sweep.max_lag)

    for i in range(sweep.n_seeds):
        path = simulate_arch(dataclasses.replace(params, seed=params.seed + i))
        for j, delta in enumerate(sweep.deltas):
            obs = observed_returns(path, delta, params.init_price)
            p0_samples[j, i] = ZeroReturnFrequency().fit(obs).p0_
            try:
                acf_samples[j, i] = estimator.fit(np.abs(obs.values)).rho_
            except ZeroVarianceError:
                pass  # flattened to a constant: this replicate has no ACF

    acf_rows, degenerate = [], []
    for j, delta in enumerate(sweep.deltas):
        valid = acf_samples[j][~np.isnan(acf_samples[j]).any(axis=1)]
        if valid.shape[0] == 0:
            degenerate.append(delta)
            for k in range(1, n_lags + 1):
                acf_rows.append((delta, k, np.nan, np.nan, 0))
            continue
        mean = valid.mean(axis=0)
        if valid.shape[0] > 1:
            stderr = valid.std(axis=0, ddof=1) / math.sqrt(valid.shape[0])
        else:
            stderr = np.full(n_lags, np.nan)
        for k in range(1, n_lags + 1):
            acf_rows.append((delta, k, mean[k - 1], stderr[k - 1], valid.shape[0]))

    p0_rows = []
    for j, delta in enumerate(sweep.deltas):
        p0 = p0_samples[j]
        stderr = p0.std(ddof=1) / math.sqrt(p0.size) if p0.size > 1 else np.nan
        p0_rows.append((delta, p0.mean(), stderr, p0.size))

    return CoarseGrainResult(
        acf=pd.DataFrame(acf_rows, columns=["delta", "lag", "acf", "stderr", "n_seeds"]),
        zero_freq=pd.DataFrame(p0_rows, columns=["delta", "p0", "stderr", "n_seeds"]),
        degenerate=tuple(degenerate),
    )
