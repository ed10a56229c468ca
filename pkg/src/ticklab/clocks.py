"""Real-time, transaction-time, and shuffled-transaction-time aggregation.

A trade stream is aggregated into bins three ways: fixed wall-clock bins
(real time), bins holding an equal number of transactions (transaction
time), and wall-clock bins refilled from a random permutation of the
per-transaction returns (shuffled transaction time).  Transaction time
destroys trade-rate fluctuations but keeps the temporal order of price
moves; the shuffle keeps the rate fluctuations but destroys the ordering
of move amplitudes.

Per-transaction returns never span a session boundary; each return is
attributed to the timestamp of the trade that completes it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientDataError,
    InternalConsistencyError,
    ParameterError,
)
from .series import ReturnSeries
from .validation import as_float_array

CLOCK_MODES = ("real_time", "transaction_time", "shuffled_transaction_time")


@dataclass(frozen=True)
class TradeRecord:
    """One transaction: seconds since its session's open, price, size."""

    timestamp: float
    price: float
    size: float | None = None
    session: int = 0


@dataclass(frozen=True)
class Trades:
    """Column store of a trade stream partitioned into sessions.

    timestamps are seconds since each session's open and must be
    non-decreasing within a session; session ids must be non-decreasing
    so sessions form contiguous blocks.
    """

    timestamps: np.ndarray
    prices: np.ndarray
    sessions: np.ndarray | None = None
    sizes: np.ndarray | None = None
    session_labels: tuple | None = None

    def __post_init__(self):
        ts = as_float_array(self.timestamps, "timestamps")
        prices = as_float_array(self.prices, "prices")
        if ts.size != prices.size:
            raise ParameterError("timestamps and prices must have equal length")
        if self.sessions is None:
            sessions = np.zeros(ts.size, dtype=np.int64)
        else:
            sessions = np.asarray(self.sessions, dtype=np.int64)
            if sessions.shape != ts.shape:
                raise ParameterError("sessions must match timestamps in length")
            if sessions.size > 1 and np.any(np.diff(sessions) < 0):
                raise ParameterError("session ids must be non-decreasing")
        for arr in (ts, prices, sessions):
            arr.setflags(write=False)
        if self.sizes is not None:
            sizes = as_float_array(self.sizes, "sizes")
            if sizes.shape != ts.shape:
                raise ParameterError("sizes must match timestamps in length")
            sizes.setflags(write=False)
            object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "sessions", sessions)
        for _, sl in self.iter_sessions():
            if np.any(np.diff(ts[sl]) < 0):
                raise ParameterError("timestamps must be non-decreasing within a session")

    def __len__(self):
        return self.timestamps.size

    @property
    def session_ids(self) -> np.ndarray:
        ids, first = np.unique(self.sessions, return_index=True)
        return ids[np.argsort(first)]

    def iter_sessions(self):
        """Yield (session_id, slice) for each contiguous session block."""
        if self.timestamps.size == 0:
            return
        bounds = np.flatnonzero(np.diff(self.sessions)) + 1
        starts = np.concatenate(([0], bounds))
        ends = np.concatenate((bounds, [self.sessions.size]))
        for a, b in zip(starts, ends):
            yield int(self.sessions[a]), slice(a, b)

    @classmethod
    def from_records(cls, records) -> "Trades":
        records = list(records)
        sizes = [r.size for r in records]
        return cls(
            timestamps=[r.timestamp for r in records],
            prices=[r.price for r in records],
            sessions=[r.session for r in records],
            sizes=None if any(s is None for s in sizes) else sizes,
        )


@dataclass(frozen=True)
class ClockSpec:
    """How trades are placed on a clock when aggregating returns.

    shuffled mode applies one seeded permutation over the whole sample by
    default; set shuffle_within_sessions to permute each session's
    returns separately.
    """

    mode: str = "real_time"
    bin_seconds: float = 900.0
    session_seconds: float = 23400.0  # 9:30-16:00 cash session
    shuffle_seed: int = 0
    shuffle_within_sessions: bool = False
    n_per_bin: int | None = None

    def __post_init__(self):
        if self.mode not in CLOCK_MODES:
            raise ParameterError(f"mode must be one of {CLOCK_MODES}, got {self.mode!r}")
        if not (np.isfinite(self.bin_seconds) and self.bin_seconds > 0):
            raise ParameterError(f"bin_seconds must be > 0, got {self.bin_seconds!r}")
        if not (np.isfinite(self.session_seconds) and self.session_seconds > 0):
            raise ParameterError(
                f"session_seconds must be > 0, got {self.session_seconds!r}"
            )
        if self.n_per_bin is not None and self.n_per_bin < 1:
            raise ParameterError(f"n_per_bin must be >= 1, got {self.n_per_bin!r}")


@dataclass(frozen=True)
class BinnedReturns:
    """Aggregated returns per bin under one clock mode.

    ``dropped`` accumulates returns excluded by the remainder rules
    (trades past the last full real-time bin, or a trailing group smaller
    than n_per_bin), so that values.sum() + dropped telescopes to the
    total within-session price change.
    """

    values: np.ndarray
    counts: np.ndarray
    sessions: np.ndarray
    starts: np.ndarray
    mode: str
    dropped: float = 0.0

    def __len__(self):
        return self.values.size


def _per_trade_returns(trades: Trades):
    """Within-session consecutive price differences with their metadata."""
    values, seconds, sessions = [], [], []
    for sid, sl in trades.iter_sessions():
        prices = trades.prices[sl]
        if prices.size < 2:
            continue
        values.append(np.diff(prices))
        seconds.append(trades.timestamps[sl][1:])
        sessions.append(np.full(prices.size - 1, sid, dtype=np.int64))
    if not values:
        raise InsufficientDataError("every session has fewer than 2 trades")
    return (
        np.concatenate(values),
        np.concatenate(seconds),
        np.concatenate(sessions),
    )


def trade_returns(trades: Trades) -> ReturnSeries:
    """Per-transaction returns; bin_labels carry the session id."""
    values, _, sessions = _per_trade_returns(trades)
    return ReturnSeries(values, bin_labels=sessions)


def bin_real_time(trades: Trades, spec: ClockSpec = ClockSpec()) -> BinnedReturns:
    """Fixed wall-clock bins of bin_seconds; empty bins keep return 0.

    A final partial bin (when bin_seconds does not divide
    session_seconds) is dropped, as are returns timestamped past the
    session end; their sum is reported in ``dropped``.
    """
    if len(trades) == 0:
        raise InsufficientDataError("no trades to bin")
    n_bins = int(spec.session_seconds // spec.bin_seconds)
    if n_bins == 0:
        raise ParameterError("bin_seconds exceeds session_seconds")
    values, seconds, sessions = _per_trade_returns(trades)

    out_values, out_counts, out_sessions, out_starts = [], [], [], []
    dropped = 0.0
    starts = np.arange(n_bins) * spec.bin_seconds
    for sid in trades.session_ids:
        mask = sessions == sid
        idx = np.floor(seconds[mask] / spec.bin_seconds).astype(np.int64)
        keep = (idx >= 0) & (idx < n_bins)
        dropped += float(values[mask][~keep].sum())
        kept_idx, kept_values = idx[keep], values[mask][keep]
        out_values.append(np.bincount(kept_idx, weights=kept_values, minlength=n_bins))
        out_counts.append(np.bincount(kept_idx, minlength=n_bins))
        out_sessions.append(np.full(n_bins, sid, dtype=np.int64))
        out_starts.append(starts)
    return BinnedReturns(
        values=np.concatenate(out_values),
        counts=np.concatenate(out_counts).astype(np.int64),
        sessions=np.concatenate(out_sessions),
        starts=np.concatenate(out_starts),
        mode="real_time",
        dropped=dropped,
    )


def mean_transactions_per_bin(trades: Trades, spec: ClockSpec = ClockSpec()) -> float:
    """Average per-transaction-return count over all real-time bins."""
    return float(bin_real_time(trades, spec).counts.mean())


def bin_transaction_time(
    trades: Trades, n_per_bin: int | None = None, spec: ClockSpec = ClockSpec()
) -> BinnedReturns:
    """Bins holding exactly n_per_bin consecutive per-transaction returns.

    Defaults n_per_bin to round(mean transactions per real-time bin).  A
    trailing remainder shorter than n_per_bin is dropped, keeping the
    equal-count property exact.
    """
    if n_per_bin is None:
        n_per_bin = spec.n_per_bin
    if n_per_bin is None:
        n_per_bin = max(1, round(mean_transactions_per_bin(trades, spec)))
    if n_per_bin < 1:
        raise ParameterError(f"n_per_bin must be >= 1, got {n_per_bin!r}")
    values, _, sessions = _per_trade_returns(trades)
    n_bins = values.size // n_per_bin
    if n_bins == 0:
        raise InsufficientDataError(
            f"fewer than n_per_bin={n_per_bin} per-transaction returns"
        )
    head = values[: n_bins * n_per_bin].reshape(n_bins, n_per_bin)
    return BinnedReturns(
        values=head.sum(axis=1),
        counts=np.full(n_bins, n_per_bin, dtype=np.int64),
        sessions=sessions[np.arange(n_bins) * n_per_bin],
        starts=np.arange(n_bins, dtype=np.float64) * n_per_bin,
        mode="transaction_time",
        dropped=float(values[n_bins * n_per_bin :].sum()),
    )


def shuffle_transaction_time(
    trades: Trades, spec: ClockSpec = ClockSpec(), permutation=None
) -> BinnedReturns:
    """Permute per-transaction returns, then refill the real-time bins.

    The permuted return sequence is consumed in bin order so that every
    bin receives exactly the transaction count of its real-time
    counterpart.  ``permutation`` overrides the seeded shuffle (test
    hook: the identity permutation reproduces bin_real_time whenever
    real-time binning dropped nothing).
    """
    rt = bin_real_time(trades, spec)
    values, _, sessions = _per_trade_returns(trades)
    if permutation is None:
        rng = np.random.default_rng(spec.shuffle_seed)
        if spec.shuffle_within_sessions:
            permutation = np.arange(values.size)
            for sid in np.unique(sessions):
                block = np.flatnonzero(sessions == sid)
                permutation[block] = block[rng.permutation(block.size)]
        else:
            permutation = rng.permutation(values.size)
    else:
        permutation = np.asarray(permutation, dtype=np.int64)
    if permutation.size != values.size or np.any(np.sort(permutation) != np.arange(values.size)):
        raise InternalConsistencyError(
            "permutation must rearrange exactly the per-transaction returns"
        )
    total = int(rt.counts.sum())
    if total > values.size:
        raise InternalConsistencyError(
            "real-time bins claim more returns than the sample holds"
        )
    permuted = values[permutation]
    csum = np.concatenate(([0.0], np.cumsum(permuted)))
    ends = np.cumsum(rt.counts)
    starts = ends - rt.counts
    return BinnedReturns(
        values=csum[ends] - csum[starts],
        counts=rt.counts,
        sessions=rt.sessions,
        starts=rt.starts,
        mode="shuffled_transaction_time",
        dropped=float(permuted[total:].sum()),
    )


def bin_returns(trades: Trades, spec: ClockSpec) -> BinnedReturns:
    """Dispatch on spec.mode."""
    if spec.mode == "real_time":
        return bin_real_time(trades, spec)
    if spec.mode == "transaction_time":
        return bin_transaction_time(trades, spec.n_per_bin, spec)
    return shuffle_transaction_time(trades, spec)
