"""Synthetic trade streams with controllable clustering regimes.

Two independent knobs reproduce the two canonical regimes of clustered
bin volatility:

* per-trade volatility clustering (rate_mode="constant",
  return_mode="arch"): the amplitude ordering of consecutive trades
  carries the clustering, the trade rate carries none;
* activity clustering (rate_mode="doubly_stochastic",
  return_mode="iid"): per-trade returns are i.i.d. and all clustering
  comes from a slowly varying trade arrival rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clocks import Trades
from .errors import ParameterError
from .series import TickGrid

RATE_MODES = ("constant", "doubly_stochastic")
RETURN_MODES = ("iid", "arch")

# Subinterval length (seconds) on which the stochastic rate is held
# constant; short against rate_timescale so the rate path is smooth.
RATE_STEP_SECONDS = 60.0


@dataclass(frozen=True)
class SynthTradeParams:
    """Settings for :func:`synth_trades`.

    With rate_mode="constant" trades arrive on a deterministic lattice
    with spacing 1/mean_rate, so a session of length L holds exactly
    floor(L * mean_rate) trades.  With rate_mode="doubly_stochastic" the
    arrival rate is mean_rate * exp(x - var/2) for a stationary
    Ornstein-Uhlenbeck path x with standard deviation rate_vol and
    relaxation time rate_timescale seconds, and counts are Poisson.

    Per-trade returns are N(0, return_std^2) when return_mode="iid", or
    an ARCH(1) recursion with (alpha0, alpha1) restarted each session
    when return_mode="arch".  delta > 0 snaps prices onto that tick grid.
    """

    n_sessions: int = 20
    session_seconds: float = 23400.0
    seed: int = 0
    rate_mode: str = "constant"
    mean_rate: float = 1.0 / 90.0
    rate_vol: float = 1.0
    rate_timescale: float = 2700.0
    return_mode: str = "iid"
    return_std: float = 1.0
    alpha0: float = 0.1
    alpha1: float = 0.9
    init_price: float = 100.0
    delta: float = 0.0

    def __post_init__(self):
        if self.rate_mode not in RATE_MODES:
            raise ParameterError(f"rate_mode must be one of {RATE_MODES}")
        if self.return_mode not in RETURN_MODES:
            raise ParameterError(f"return_mode must be one of {RETURN_MODES}")
        if self.n_sessions < 1:
            raise ParameterError("n_sessions must be >= 1")
        for name in ("session_seconds", "mean_rate", "return_std", "alpha0",
                     "rate_timescale"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be > 0, got {value!r}")
        if not (0 <= self.alpha1 < 1):
            raise ParameterError("alpha1 must lie in [0, 1)")
        if self.rate_vol < 0 or self.delta < 0:
            raise ParameterError("rate_vol and delta must be >= 0")


def _session_times(params: SynthTradeParams, rng) -> np.ndarray:
    if params.rate_mode == "constant":
        n = int(params.session_seconds * params.mean_rate)
        return np.arange(n) / params.mean_rate
    # piecewise-constant log-normal Cox process driven by an OU path
    n_steps = max(1, int(round(params.session_seconds / RATE_STEP_SECONDS)))
    step = params.session_seconds / n_steps
    phi = math.exp(-step / params.rate_timescale)
    innov = rng.standard_normal(n_steps) * math.sqrt(1 - phi * phi)
    x = np.empty(n_steps)
    x[0] = rng.standard_normal()
    for j in range(1, n_steps):
        x[j] = phi * x[j - 1] + innov[j]
    x *= params.rate_vol
    rates = params.mean_rate * np.exp(x - 0.5 * params.rate_vol**2)
    counts = rng.poisson(rates * step)
    times = np.concatenate(
        [
            np.sort(rng.uniform(j * step, (j + 1) * step, size=c))
            for j, c in enumerate(counts)
        ]
        or [np.empty(0)]
    )
    return times


def _session_returns(n: int, params: SynthTradeParams, rng) -> np.ndarray:
    if n <= 0:
        return np.empty(0)
    if params.return_mode == "iid":
        return params.return_std * rng.standard_normal(n)
    z = rng.standard_normal(n)
    r = np.empty(n)
    # virtual previous squared return at its stationary mean, so the
    # recursion starts without a transient
    prev_sq = params.alpha0 / (1.0 - params.alpha1)
    for t in range(n):
        r[t] = math.sqrt(params.alpha0 + params.alpha1 * prev_sq) * z[t]
        prev_sq = r[t] * r[t]
    return r


def synth_trades(params: SynthTradeParams) -> Trades:
    """Generate a deterministic multi-session trade stream.

    The price path carries over from session to session; the n-th trade
    of a session realises the n-1st within-session return, so
    session-level telescoping holds exactly.
    """
    rng = np.random.default_rng(params.seed)
    timestamps, prices, sessions = [], [], []
    last_price = params.init_price
    grid = TickGrid(params.delta) if params.delta > 0 else None
    for sid in range(params.n_sessions):
        times = _session_times(params, rng)
        n = times.size
        if n == 0:
            continue
        increments = _session_returns(n - 1, params, rng)
        p = np.empty(n)
        p[0] = last_price
        if n > 1:
            p[1:] = last_price + np.cumsum(increments)
        last_price = p[-1]
        if grid is not None:
            p = grid.snap(p)
        timestamps.append(times)
        prices.append(p)
        sessions.append(np.full(n, sid, dtype=np.int64))
    if not timestamps:
        raise ParameterError("parameters generated an empty trade stream")
    return Trades(
        timestamps=np.concatenate(timestamps),
        prices=np.concatenate(prices),
        sessions=np.concatenate(sessions),
    )
