"""Command-line interface.

Subcommands mirror the pipeline stages: ``simulate``, ``discretize``,
``estimate <which>``, ``clock <mode>``, ``ttest``, and ``run <config>``.
Every subcommand reads CSV from a path or stdin ('-') and writes CSV to
a path or stdout ('-').  Exit codes: 0 success, 2 configuration or
parameter error, 3 data error, 4 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np
import pandas as pd

from .arch import ArchParams, simulate_arch
from .clocks import CLOCK_MODES, ClockSpec, bin_real_time, bin_transaction_time, shuffle_transaction_time
from .errors import (
    ConfigError,
    DegenerateDataError,
    InsufficientDataError,
    PanelMismatchError,
    ParameterError,
    SchemaError,
    TickLabError,
)
from .estimators import acf, ccdf, dfa_hurst, hill, zero_frequency
from .experiments import ExperimentConfig, run_experiment
from .io import TradeCsvSchema, load_trades_csv
from .panel import build_panel, paired_one_sided_ttest
from .series import PriceSeries, TickGrid, discretize, integrate

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DEGENERATE = 4


def _read_csv(path):
    return pd.read_csv(sys.stdin if path == "-" else path)


def _write_csv(frame: pd.DataFrame, path):
    frame.to_csv(sys.stdout if path == "-" else path, index=False)


def _column(frame: pd.DataFrame, name, what):
    if name in frame.columns:
        return frame[name].to_numpy(dtype=float)
    numeric = frame.select_dtypes("number")
    if numeric.shape[1] == 1:
        return numeric.iloc[:, 0].to_numpy(dtype=float)
    raise SchemaError(f"cannot locate the {what} column {name!r} in {list(frame.columns)}")


def _cmd_simulate(args):
    params = ArchParams(
        alpha0=args.alpha0, alpha1=args.alpha1, n=args.n, seed=args.seed,
        init_return=args.init_return, init_price=args.init_price, burn_in=args.burn_in,
    )
    r = simulate_arch(params)
    if args.emit == "returns":
        frame = pd.DataFrame({"t": np.arange(len(r)), "r": r.values})
    else:
        p = integrate(r, params.init_price)
        frame = pd.DataFrame({"t": p.timestamps, "price": p.prices})
    _write_csv(frame, args.out)


def _cmd_discretize(args):
    frame = _read_csv(args.input)
    prices = _column(frame, args.column, "price")
    snapped = TickGrid(args.delta).snap(prices)
    out = frame.copy()
    out[args.column if args.column in frame.columns else frame.columns[-1]] = snapped
    _write_csv(out, args.out)


def _cmd_estimate(args):
    frame = _read_csv(args.input)
    values = _column(frame, args.column, "return")
    if args.which == "ccdf":
        fitted = ccdf(values)
        out = pd.DataFrame({"threshold": fitted.thresholds_, "probability": fitted.probabilities_})
    elif args.which == "zero_freq":
        fitted = zero_frequency(values)
        out = pd.DataFrame({"p0": [fitted.p0_], "n": [fitted.n_]})
    elif args.which == "hill":
        fitted = hill(values, tail_fraction=args.tail_fraction)
        out = pd.DataFrame(
            {"alpha_h": [fitted.alpha_h_], "k_tail": [fitted.k_tail_], "ci95": [fitted.ci95_]}
        )
    elif args.which == "acf":
        fitted = acf(np.abs(values) if args.absolute else values, max_lag=args.max_lag)
        out = pd.DataFrame({"lag": fitted.lags_, "rho": fitted.rho_})
    else:  # dfa
        fitted = dfa_hurst(
            np.abs(values) if args.absolute else values,
            min_window=args.min_window,
            max_window=args.max_window,
            n_windows=args.n_windows,
        )
        out = pd.DataFrame(
            {
                "window": fitted.window_sizes_,
                "fluctuation": fitted.fluctuation_,
                "hurst": fitted.hurst_,
                "fit_stderr": fitted.fit_stderr_,
            }
        )
    _write_csv(out, args.out)


def _trades_from_args(args):
    schema = TradeCsvSchema(
        timestamp_col=args.timestamp_col,
        price_col=args.price_col,
        size_col=args.size_col,
        instrument_col=args.instrument_col,
        session_col=args.session_col,
        timestamp_format=args.timestamp_format,
        session_open=args.session_open,
        session_close=args.session_close,
    )
    per_instrument, report = load_trades_csv(args.input, schema)
    if report.n_malformed or report.n_value_rejects:
        log.warning(
            "ingest: %d malformed, %d rejected of %d rows",
            report.n_malformed, report.n_value_rejects, report.n_rows,
        )
    return per_instrument


def _cmd_clock(args):
    spec = ClockSpec(
        mode=args.mode,
        bin_seconds=args.bin_seconds,
        session_seconds=args.session_seconds,
        shuffle_seed=args.shuffle_seed,
        shuffle_within_sessions=args.per_session_shuffle,
        n_per_bin=args.n_per_bin,
    )
    rows = []
    for name, trades in sorted(_trades_from_args(args).items()):
        if args.mode == "real_time":
            bins = bin_real_time(trades, spec)
        elif args.mode == "transaction_time":
            bins = bin_transaction_time(trades, spec.n_per_bin, spec)
        else:
            bins = shuffle_transaction_time(trades, spec)
        for s, start, v, c in zip(bins.sessions, bins.starts, bins.values, bins.counts):
            rows.append((name, s, start, v, c))
    _write_csv(
        pd.DataFrame(rows, columns=["instrument", "session", "start", "value", "count"]),
        args.out,
    )


def _cmd_ttest(args):
    frame = _read_csv(args.input)
    for col in ("instrument", "before", "after"):
        if col not in frame.columns:
            raise SchemaError(f"t-test input needs columns instrument,before,after; got {list(frame.columns)}")
    panel = build_panel(
        dict(zip(frame["instrument"].astype(str), frame["before"].astype(float))),
        dict(zip(frame["instrument"].astype(str), frame["after"].astype(float))),
        statistic=args.statistic,
    )
    result = paired_one_sided_ttest(panel, alternative=args.alternative)
    _write_csv(
        pd.DataFrame(
            {
                "statistic": [args.statistic],
                "n": [len(panel)],
                "dof": [result.dof],
                "t_stat": [result.t_stat],
                "p_value": [result.p_value],
                "alternative": [result.direction],
            }
        ),
        args.out,
    )


def _cmd_run(args):
    cfg = ExperimentConfig.from_file(args.config, seed=args.seed, out_dir=args.out_dir)
    result = run_experiment(cfg)
    if not args.quiet:
        for path in result.outputs:
            print(path)


def _add_io_args(parser, output_only=False):
    if not output_only:
        parser.add_argument("--input", "-i", default="-", help="input CSV path or '-' for stdin")
    parser.add_argument("--out", "-o", default="-", help="output CSV path or '-' for stdout")


def _add_trade_schema_args(parser):
    parser.add_argument("--timestamp-col", default="timestamp")
    parser.add_argument("--price-col", default="price")
    parser.add_argument("--size-col", default="size")
    parser.add_argument("--instrument-col", default=None)
    parser.add_argument("--session-col", default=None)
    parser.add_argument("--timestamp-format", default=None)
    parser.add_argument("--session-open", default="09:30:00")
    parser.add_argument("--session-close", default="16:00:00")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ticklab", description=__doc__)
    parser.add_argument("--quiet", action="store_true", help="suppress informational logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate an ARCH(1) return or price path")
    p.add_argument("--alpha0", type=float, default=0.1)
    p.add_argument("--alpha1", type=float, default=0.9)
    p.add_argument("--n", type=int, default=2**16)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--init-return", type=float, default=0.0)
    p.add_argument("--init-price", type=float, default=0.0)
    p.add_argument("--burn-in", type=int, default=1024)
    p.add_argument("--emit", choices=("returns", "prices"), default="returns")
    _add_io_args(p, output_only=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("discretize", help="floor prices onto a tick grid")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--column", default="price")
    _add_io_args(p)
    p.set_defaults(func=_cmd_discretize)

    p = sub.add_parser("estimate", help="run one estimator on a return series")
    p.add_argument("which", choices=("ccdf", "zero_freq", "hill", "acf", "dfa"))
    p.add_argument("--column", default="r")
    p.add_argument("--absolute", action="store_true", help="estimate on |returns|")
    p.add_argument("--tail-fraction", type=float, default=0.05)
    p.add_argument("--max-lag", type=int, default=20)
    p.add_argument("--min-window", type=int, default=16)
    p.add_argument("--max-window", type=int, default=None)
    p.add_argument("--n-windows", type=int, default=10)
    _add_io_args(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("clock", help="aggregate a trade CSV under one clock mode")
    p.add_argument("mode", choices=CLOCK_MODES)
    p.add_argument("--bin-seconds", type=float, default=900.0)
    p.add_argument("--session-seconds", type=float, default=23400.0)
    p.add_argument("--n-per-bin", type=int, default=None)
    p.add_argument("--shuffle-seed", type=int, default=0)
    p.add_argument("--per-session-shuffle", action="store_true")
    _add_trade_schema_args(p)
    _add_io_args(p)
    p.set_defaults(func=_cmd_clock)

    p = sub.add_parser("ttest", help="paired one-sided t-test on a before/after panel")
    p.add_argument("--alternative", choices=("greater", "less"), required=True)
    p.add_argument("--statistic", default="")
    _add_io_args(p)
    p.set_defaults(func=_cmd_ttest)

    p = sub.add_parser("run", help="run a config-driven experiment")
    p.add_argument("config", help="INI config path")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", dest="out_dir", default=None, help="override the output directory")
    p.set_defaults(func=_cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if not hasattr(args, "quiet"):
        args.quiet = False
    try:
        args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchemaError, InsufficientDataError, PanelMismatchError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DegenerateDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except TickLabError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
