"""Trade CSV ingestion with sessionization.

Timestamps may be ISO-8601 datetimes, epoch seconds, or, when a session
column is declared, plain seconds since that session's open.  Wall-clock
timestamps are sessionized by calendar date and converted to seconds
since the configured session open.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .clocks import Trades
from .errors import SchemaError

log = logging.getLogger(__name__)

DEFAULT_INSTRUMENT = "all"
MALFORMED_ABORT_FRACTION = 0.01
MAX_REPORTED_REJECTS = 20


@dataclass(frozen=True)
class TradeCsvSchema:
    """Column mapping and session conventions for a trade CSV."""

    timestamp_col: str = "timestamp"
    price_col: str = "price"
    size_col: str | None = "size"
    instrument_col: str | None = None
    session_col: str | None = None
    timestamp_format: str | None = None  # strptime format; None = auto
    session_open: str = "09:30:00"
    session_close: str = "16:00:00"


@dataclass
class IngestReport:
    """Row-level accounting for one ingested file."""

    n_rows: int = 0
    n_malformed: int = 0
    n_value_rejects: int = 0
    rejects: list = field(default_factory=list)  # (row_number, reason)
    warnings: list = field(default_factory=list)

    def note_reject(self, row_number, reason):
        if len(self.rejects) < MAX_REPORTED_REJECTS:
            self.rejects.append((row_number, reason))


def _parse_time_of_day(text: str) -> float:
    h, m, s = (text.split(":") + ["0", "0"])[:3]
    return int(h) * 3600.0 + int(m) * 60.0 + float(s)


def _parse_timestamp(raw: str, schema: TradeCsvSchema):
    """Return ("wall", datetime) or ("seconds", float)."""
    raw = raw.strip()
    if schema.timestamp_format:
        return "wall", datetime.strptime(raw, schema.timestamp_format)
    try:
        return "seconds", float(raw)
    except ValueError:
        return "wall", datetime.fromisoformat(raw)


def load_trades_csv(path, schema: TradeCsvSchema = TradeCsvSchema()):
    """Parse a trade CSV into per-instrument Trades.

    Returns (dict instrument -> Trades, IngestReport).  Malformed rows
    are counted and reported; more than 1% of them aborts the load.
    Rows with a non-positive price are rejected but never abort.  Trades
    arriving out of order within a session are stably re-sorted with a
    warning.
    """
    rows = []  # (instrument, session_key, seconds_or_dt, price, size, row_no)
    report = IngestReport()
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for col in (schema.timestamp_col, schema.price_col):
            if col not in header:
                raise SchemaError(f"missing required column {col!r} in header {header}")
        for col in (schema.size_col, schema.instrument_col, schema.session_col):
            if col is not None and col not in header and col != "size":
                raise SchemaError(f"declared column {col!r} absent from header {header}")
        has_size = schema.size_col is not None and schema.size_col in header

        for row_no, row in enumerate(reader, start=2):
            report.n_rows += 1
            try:
                kind, ts = _parse_timestamp(row[schema.timestamp_col], schema)
                price = float(row[schema.price_col])
                size = float(row[schema.size_col]) if has_size and row[schema.size_col] else None
                session_key = row[schema.session_col] if schema.session_col else None
            except (ValueError, KeyError, TypeError) as exc:
                report.n_malformed += 1
                report.note_reject(row_no, f"malformed: {exc}")
                continue
            if not np.isfinite(price) or price <= 0:
                report.n_value_rejects += 1
                report.note_reject(row_no, f"non-positive price {price!r}")
                continue
            instrument = (
                row[schema.instrument_col] if schema.instrument_col else DEFAULT_INSTRUMENT
            )
            rows.append((instrument, session_key, kind, ts, price, size, row_no))

    if report.n_rows and report.n_malformed / report.n_rows > MALFORMED_ABORT_FRACTION:
        detail = "; ".join(f"row {n}: {r}" for n, r in report.rejects)
        raise SchemaError(
            f"{report.n_malformed}/{report.n_rows} malformed rows (> 1%): {detail}"
        )

    open_seconds = _parse_time_of_day(schema.session_open)
    per_instrument = {}
    for instrument, session_key, kind, ts, price, size, row_no in rows:
        if session_key is not None:
            label, seconds = session_key, float(ts) if kind == "seconds" else None
            if seconds is None:
                seconds = _to_session_seconds(ts, open_seconds)[1]
        elif kind == "wall":
            label, seconds = _to_session_seconds(ts, open_seconds)
        else:  # epoch seconds: session = UTC date
            dt = datetime.fromtimestamp(float(ts), tz=timezone.utc)
            label, seconds = _to_session_seconds(dt, open_seconds)
        per_instrument.setdefault(instrument, []).append((label, seconds, price, size))

    out = {}
    for instrument, entries in per_instrument.items():
        labels = sorted({label for label, *_ in entries})
        session_ids = {label: i for i, label in enumerate(labels)}
        sess = np.array([session_ids[e[0]] for e in entries], dtype=np.int64)
        secs = np.array([e[1] for e in entries])
        prices = np.array([e[2] for e in entries])
        sizes = [e[3] for e in entries]
        order = np.lexsort((np.arange(sess.size), secs, sess))
        if not np.array_equal(order, np.arange(sess.size)):
            report.warnings.append(
                f"{instrument}: trades out of order within a session, re-sorted"
            )
            log.warning("ticklab.io: %s", report.warnings[-1])
        out[instrument] = Trades(
            timestamps=secs[order],
            prices=prices[order],
            sessions=sess[order],
            sizes=None if any(s is None for s in sizes) else np.asarray(sizes)[order],
            session_labels=tuple(labels),
        )
    return out, report


def _to_session_seconds(dt: datetime, open_seconds: float):
    midnight = dt.replace(hour=0, minute=0, second=0, microsecond=0)
    label = dt.date().isoformat()
    return label, (dt - midnight).total_seconds() - open_seconds
