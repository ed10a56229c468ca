"""Config-driven experiment pipelines and plot-ready output emission.

Configs are flat INI files with one section per stage.  Every run writes
headered CSV data files plus a ``manifest.json`` recording the config
hash, the seed, every resolved setting, and the summary statistics, so a
rerun with the same config reproduces every output byte.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import __version__
from .arch import ArchParams, CoarseGrainSweep, coarse_grain_experiment, observed_returns, simulate_arch
from .clocks import ClockSpec, Trades, bin_real_time, bin_transaction_time, shuffle_transaction_time
from .errors import ConfigError, TickLabError
from .estimators import AcfEstimator, DfaHurst, EmpiricalCcdf, HillEstimator, ZeroReturnFrequency
from .io import TradeCsvSchema, load_trades_csv
from .panel import build_panel, paired_one_sided_ttest
from .seeds import stage_seed
from .synth import SynthTradeParams, synth_trades

log = logging.getLogger(__name__)

EXPERIMENT_KINDS = (
    "arch_sweep",
    "distribution_compare",
    "acf_compare",
    "subordination_compare",
    "panel_test",
)

# one-sided alternative per panel statistic, matching the sign conventions
# of the before/after tests (difference = after - before)
PANEL_ALTERNATIVES = {"p0": "less", "alpha_h": "less", "rho": "greater", "hurst": "greater"}


class _Section:
    """Typed access to one config section with default tracking."""

    def __init__(self, name, mapping, resolved):
        self.name = name
        self._mapping = dict(mapping)
        self._resolved = resolved.setdefault(name, {})

    def _record(self, key, value):
        self._resolved[key] = value
        return value

    def get_str(self, key, default=None):
        return self._record(key, self._mapping.get(key, default))

    def get_float(self, key, default):
        try:
            return self._record(key, float(self._mapping.get(key, default)))
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: {exc}") from exc

    def get_int(self, key, default):
        try:
            return self._record(key, int(self._mapping.get(key, default)))
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: {exc}") from exc

    def get_bool(self, key, default):
        raw = self._mapping.get(key)
        if raw is None:
            return self._record(key, default)
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return self._record(key, True)
        if lowered in ("0", "false", "no", "off"):
            return self._record(key, False)
        raise ConfigError(f"[{self.name}] {key}: not a boolean: {raw!r}")

    def get_floats(self, key, default):
        raw = self._mapping.get(key)
        if raw is None:
            return self._record(key, list(default))
        try:
            return self._record(key, [float(v) for v in raw.split(",") if v.strip()])
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: {exc}") from exc

    def get_ints(self, key, default):
        return [int(v) for v in self.get_floats(key, default)]


@dataclass
class ExperimentConfig:
    """Parsed experiment configuration; see the README for all keys."""

    kind: str
    seed: int
    out_dir: str
    sections: dict
    raw_text: str
    resolved: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path, seed=None, out_dir=None) -> "ExperimentConfig":
        try:
            with open(path) as handle:
                raw_text = handle.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        parser = configparser.ConfigParser()
        try:
            parser.read_string(raw_text)
        except configparser.Error as exc:
            raise ConfigError(f"invalid config {path!r}: {exc}") from exc
        sections = {name: dict(parser.items(name)) for name in parser.sections()}
        exp = sections.get("experiment", {})
        kind = exp.get("kind")
        if kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"[experiment] kind must be one of {EXPERIMENT_KINDS}, got {kind!r}")
        if seed is None:
            if "seed" not in exp:
                raise ConfigError("[experiment] seed is mandatory; refusing a wall-clock default")
            try:
                seed = int(exp["seed"])
            except ValueError as exc:
                raise ConfigError(f"[experiment] seed: {exc}") from exc
        if out_dir is None:
            out_dir = exp.get("out", "results")
        return cls(kind=kind, seed=int(seed), out_dir=str(out_dir),
                   sections=sections, raw_text=raw_text)

    def section(self, name) -> _Section:
        return _Section(name, self.sections.get(name, {}), self.resolved)


@dataclass
class ExperimentResult:
    out_dir: str
    outputs: list
    manifest: dict


def _arch_params(sec: _Section, seed: int) -> ArchParams:
    return ArchParams(
        alpha0=sec.get_float("alpha0", 0.1),
        alpha1=sec.get_float("alpha1", 0.9),
        n=sec.get_int("n", 2**16),
        burn_in=sec.get_int("burn_in", 1024),
        init_price=sec.get_float("init_price", 0.0),
        seed=seed,
    )


def _clock_spec(sec: _Section, seed: int, mode="real_time") -> ClockSpec:
    n_per_bin = sec.get_int("n_per_bin", 0)
    return ClockSpec(
        mode=mode,
        bin_seconds=sec.get_float("bin_seconds", 900.0),
        session_seconds=sec.get_float("session_seconds", 23400.0),
        shuffle_seed=stage_seed(seed, "clock:shuffle"),
        shuffle_within_sessions=sec.get_bool("shuffle_within_sessions", False),
        n_per_bin=n_per_bin if n_per_bin > 0 else None,
    )


def _synth_params(sec: _Section, seed: int) -> SynthTradeParams:
    return SynthTradeParams(
        n_sessions=sec.get_int("n_sessions", 20),
        session_seconds=sec.get_float("session_seconds", 23400.0),
        seed=seed,
        rate_mode=sec.get_str("rate_mode", "constant"),
        mean_rate=sec.get_float("mean_rate", 1.0 / 90.0),
        rate_vol=sec.get_float("rate_vol", 1.0),
        rate_timescale=sec.get_float("rate_timescale", 2700.0),
        return_mode=sec.get_str("return_mode", "iid"),
        return_std=sec.get_float("return_std", 1.0),
        alpha0=sec.get_float("alpha0", 0.1),
        alpha1=sec.get_float("alpha1", 0.9),
        init_price=sec.get_float("init_price", 100.0),
        delta=sec.get_float("delta", 0.0),
    )


def _csv_schema(sec: _Section) -> TradeCsvSchema:
    return TradeCsvSchema(
        timestamp_col=sec.get_str("timestamp_col", "timestamp"),
        price_col=sec.get_str("price_col", "price"),
        size_col=sec.get_str("size_col", "size"),
        instrument_col=sec.get_str("instrument_col", None),
        session_col=sec.get_str("session_col", None),
        timestamp_format=sec.get_str("timestamp_format", None),
        session_open=sec.get_str("session_open", "09:30:00"),
        session_close=sec.get_str("session_close", "16:00:00"),
    )


def _slice_sessions(trades: Trades, spec: str | None) -> Trades:
    """Restrict to a session-index range 'start:stop' (half-open)."""
    if not spec:
        return trades
    try:
        start_s, stop_s = spec.split(":")
        start, stop = int(start_s or 0), int(stop_s) if stop_s else None
    except ValueError as exc:
        raise ConfigError(f"bad session range {spec!r}: expected 'start:stop'") from exc
    ids = trades.session_ids[start:stop]
    mask = np.isin(trades.sessions, ids)
    return Trades(
        timestamps=trades.timestamps[mask],
        prices=trades.prices[mask],
        sessions=trades.sessions[mask],
        sizes=None if trades.sizes is None else trades.sizes[mask],
        session_labels=trades.session_labels,
    )


def _regime_returns(cfg: ExperimentConfig, window: str, instrument_seed_tag=""):
    """Return sample for one before/after window: synthetic or CSV-based."""
    sec = cfg.section(window)
    source = sec.get_str("source", "synth")
    if source == "synth":
        # one path per instrument, shared across windows, so synthetic
        # before/after regimes differ only in the settings (e.g. delta)
        tag = instrument_seed_tag or window
        params = _arch_params(sec, stage_seed(cfg.seed, f"regime:{tag}:arch"))
        delta = sec.get_float("delta", 0.0)
        if sec.get_bool("delta_in_std", True):
            delta *= params.stationary_std
        return observed_returns(simulate_arch(params), delta, params.init_price).values
    if source == "csv":
        path = sec.get_str("csv", None)
        if not path:
            raise ConfigError(f"[{window}] csv path is required when source=csv")
        per_instrument, _ = load_trades_csv(path, _csv_schema(cfg.section("data")))
        name = instrument_seed_tag or sec.get_str("instrument", None) or next(iter(per_instrument))
        if name not in per_instrument:
            raise ConfigError(f"instrument {name!r} not present in {path!r}")
        trades = _slice_sessions(per_instrument[name], sec.get_str("sessions", None))
        spec = _clock_spec(cfg.section("clock"), cfg.seed)
        return bin_real_time(trades, spec).values
    raise ConfigError(f"[{window}] source must be 'synth' or 'csv', got {source!r}")


def _check_paths(cfg: ExperimentConfig):
    """All file inputs must resolve before any stage runs."""
    for name, mapping in cfg.sections.items():
        path = mapping.get("csv")
        if path and not os.path.exists(path):
            raise ConfigError(f"[{name}] csv path does not resolve: {path!r}")


def _estimator_settings(cfg: ExperimentConfig):
    sec = cfg.section("estimators")
    return {
        "tail_fraction": sec.get_float("tail_fraction", 0.05),
        "acf_max_lag": sec.get_int("acf_max_lag", 20),
        "acf_test_lags": sec.get_ints("acf_test_lags", [1, 2, 3, 4]),
        "dfa_min_window": sec.get_int("dfa_min_window", 16),
        "dfa_max_window": sec.get_int("dfa_max_window", 0),
        "dfa_n_windows": sec.get_int("dfa_n_windows", 10),
        "ccdf_points": sec.get_int("ccdf_points", 50),
    }


def _ccdf_thresholds(samples, n_points):
    """Shared log-spaced thresholds spanning all regimes' magnitudes."""
    mags = np.abs(np.concatenate(samples))
    mags = mags[mags > 0]
    if mags.size == 0:
        return np.array([1.0])
    lo, hi = mags.min(), mags.max()
    if lo == hi:
        return np.array([lo])
    return np.geomspace(lo, hi, n_points)


def _run_arch_sweep(cfg: ExperimentConfig):
    params = _arch_params(cfg.section("arch"), stage_seed(cfg.seed, "arch_sweep"))
    sec = cfg.section("sweep")
    deltas = sec.get_floats("deltas", [0.0, 0.25, 0.5, 1.0, 2.0])
    if sec.get_bool("deltas_in_std", True):
        deltas = [d * params.stationary_std for d in deltas]
    sweep = CoarseGrainSweep(
        deltas=tuple(deltas),
        max_lag=sec.get_int("max_lag", 20),
        n_seeds=sec.get_int("n_seeds", 20),
    )
    result = coarse_grain_experiment(params, sweep)
    lag1 = result.acf[result.acf["lag"] == 1]
    summary = {
        "stationary_std": params.stationary_std,
        "degenerate_deltas": list(result.degenerate),
        "acf_lag1_by_delta": {f"{d:g}": (None if np.isnan(v) else v)
                              for d, v in zip(lag1["delta"], lag1["acf"])},
        "p0_by_delta": {f"{d:g}": v
                        for d, v in zip(result.zero_freq["delta"], result.zero_freq["p0"])},
    }
    tables = {"arch_sweep_acf.csv": result.acf, "arch_sweep_zero_freq.csv": result.zero_freq}
    return tables, summary


def _run_distribution_compare(cfg: ExperimentConfig):
    est = _estimator_settings(cfg)
    samples = {w: _regime_returns(cfg, w) for w in ("before", "after")}
    thresholds = _ccdf_thresholds(samples.values(), est["ccdf_points"])
    ccdf_rows, summary_rows, summary = [], [], {}
    for window, values in samples.items():
        fitted = EmpiricalCcdf(thresholds=thresholds).fit(values)
        for x, p in zip(fitted.thresholds_, fitted.probabilities_):
            ccdf_rows.append((window, x, p))
        zero = ZeroReturnFrequency().fit(values)
        hill_est = HillEstimator(tail_fraction=est["tail_fraction"]).fit(values)
        summary_rows.append(
            (window, zero.n_, zero.p0_, hill_est.alpha_h_, hill_est.k_tail_, hill_est.ci95_)
        )
        summary[window] = {"p0": zero.p0_, "alpha_h": hill_est.alpha_h_, "n": zero.n_}
    tables = {
        "ccdf.csv": pd.DataFrame(ccdf_rows, columns=["window", "threshold", "probability"]),
        "distribution_summary.csv": pd.DataFrame(
            summary_rows, columns=["window", "n", "p0", "alpha_h", "k_tail", "ci95"]
        ),
    }
    return tables, summary


def _run_acf_compare(cfg: ExperimentConfig):
    est = _estimator_settings(cfg)
    samples = {w: _regime_returns(cfg, w) for w in ("before", "after")}
    acf_rows, hurst_rows, summary = [], [], {}
    for window, values in samples.items():
        fitted = AcfEstimator(max_lag=est["acf_max_lag"]).fit(np.abs(values))
        for lag, rho in zip(fitted.lags_, fitted.rho_):
            acf_rows.append((window, lag, rho))
        dfa = DfaHurst(
            min_window=est["dfa_min_window"],
            max_window=est["dfa_max_window"] or None,
            n_windows=est["dfa_n_windows"],
        ).fit(np.abs(values))
        hurst_rows.append((window, dfa.hurst_, dfa.fit_stderr_))
        summary[window] = {"acf_lag1": fitted.rho_[0], "hurst": dfa.hurst_}
    tables = {
        "acf.csv": pd.DataFrame(acf_rows, columns=["window", "lag", "rho"]),
        "hurst.csv": pd.DataFrame(hurst_rows, columns=["window", "hurst", "fit_stderr"]),
    }
    return tables, summary


def _run_subordination_compare(cfg: ExperimentConfig):
    est = _estimator_settings(cfg)
    data_sec = cfg.sections.get("data", {})
    if data_sec.get("csv"):
        per_instrument, _ = load_trades_csv(data_sec["csv"], _csv_schema(cfg.section("data")))
        sec = cfg.section("data")
        name = sec.get_str("instrument", None) or next(iter(per_instrument))
        trades = per_instrument[name]
    else:
        trades = synth_trades(_synth_params(cfg.section("synth"), stage_seed(cfg.seed, "synth")))
    spec = _clock_spec(cfg.section("clock"), cfg.seed)
    binned = {
        "real_time": bin_real_time(trades, spec),
        "transaction_time": bin_transaction_time(trades, spec.n_per_bin, spec),
        "shuffled_transaction_time": shuffle_transaction_time(trades, spec),
    }
    thresholds = _ccdf_thresholds([b.values for b in binned.values()], est["ccdf_points"])
    bin_rows, acf_rows, ccdf_rows, summary = [], [], [], {}
    for mode, bins in binned.items():
        for s, start, v, c in zip(bins.sessions, bins.starts, bins.values, bins.counts):
            bin_rows.append((mode, s, start, v, c))
        fitted = AcfEstimator(max_lag=est["acf_max_lag"]).fit(np.abs(bins.values))
        for lag, rho in zip(fitted.lags_, fitted.rho_):
            acf_rows.append((mode, lag, rho))
        cc = EmpiricalCcdf(thresholds=thresholds).fit(bins.values)
        for x, p in zip(cc.thresholds_, cc.probabilities_):
            ccdf_rows.append((mode, x, p))
        summary[mode] = {"acf_lag1": fitted.rho_[0], "n_bins": len(bins)}
    tables = {
        "bins.csv": pd.DataFrame(bin_rows, columns=["mode", "session", "start", "value", "count"]),
        "acf_clocks.csv": pd.DataFrame(acf_rows, columns=["mode", "lag", "rho"]),
        "ccdf_clocks.csv": pd.DataFrame(ccdf_rows, columns=["mode", "threshold", "probability"]),
    }
    return tables, summary


def _panel_statistics(values, est):
    stats = {"p0": ZeroReturnFrequency().fit(values).p0_}
    stats["alpha_h"] = HillEstimator(tail_fraction=est["tail_fraction"]).fit(values).alpha_h_
    max_lag = max(est["acf_test_lags"])
    fitted = AcfEstimator(max_lag=max_lag).fit(np.abs(values))
    for lag in est["acf_test_lags"]:
        stats[f"rho({lag})"] = fitted.rho_[lag - 1]
    dfa = DfaHurst(
        min_window=est["dfa_min_window"],
        max_window=est["dfa_max_window"] or None,
        n_windows=est["dfa_n_windows"],
    ).fit(np.abs(values))
    stats["hurst"] = dfa.hurst_
    return stats


def _run_panel_test(cfg: ExperimentConfig):
    est = _estimator_settings(cfg)
    panel_sec = cfg.section("panel")
    instruments = panel_sec.get_str("instruments", None)
    if instruments:
        labels = [name.strip() for name in instruments.split(",") if name.strip()]
    else:
        labels = [f"I{i:02d}" for i in range(panel_sec.get_int("n_instruments", 5))]
    per_window = {"before": {}, "after": {}}
    for window in ("before", "after"):
        for label in labels:
            values = _regime_returns(cfg, window, instrument_seed_tag=label)
            per_window[window][label] = _panel_statistics(values, est)

    statistic_names = list(per_window["before"][labels[0]])
    estimate_rows, ttest_rows, summary = [], [], {}
    for name in statistic_names:
        before = {k: v[name] for k, v in per_window["before"].items()}
        after = {k: v[name] for k, v in per_window["after"].items()}
        panel = build_panel(before, after, statistic=name)
        for label, b, a, d in zip(panel.labels, panel.before, panel.after, panel.differences):
            estimate_rows.append((name, label, b, a, d))
        alternative = PANEL_ALTERNATIVES["rho" if name.startswith("rho") else name]
        result = paired_one_sided_ttest(panel, alternative=alternative)
        ttest_rows.append(
            (name, len(panel), result.dof, result.t_stat, result.p_value, result.direction)
        )
        summary[name] = {"t_stat": result.t_stat, "p_value": result.p_value}
    tables = {
        "panel_estimates.csv": pd.DataFrame(
            estimate_rows, columns=["statistic", "instrument", "before", "after", "difference"]
        ),
        "ttests.csv": pd.DataFrame(
            ttest_rows, columns=["statistic", "n", "dof", "t_stat", "p_value", "alternative"]
        ),
    }
    return tables, summary


_RUNNERS = {
    "arch_sweep": _run_arch_sweep,
    "distribution_compare": _run_distribution_compare,
    "acf_compare": _run_acf_compare,
    "subordination_compare": _run_subordination_compare,
    "panel_test": _run_panel_test,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one experiment and write its tables plus manifest.json.

    Deterministic for a fixed config and seed.  On failure the error is
    re-raised with the failing stage named and any partially written
    output is removed.
    """
    _check_paths(cfg)
    try:
        tables, summary = _RUNNERS[cfg.kind](cfg)
    except TickLabError as exc:
        raise type(exc)(f"stage '{cfg.kind}': {exc}") from exc

    manifest = {
        "kind": cfg.kind,
        "seed": cfg.seed,
        "config_sha256": hashlib.sha256(cfg.raw_text.encode()).hexdigest(),
        "package_version": __version__,
        "settings": cfg.resolved,
        "summary": summary,
        "outputs": sorted(tables),
    }

    os.makedirs(cfg.out_dir, exist_ok=True)
    written = []
    try:
        for filename, frame in tables.items():
            path = os.path.join(cfg.out_dir, filename)
            frame.to_csv(path, index=False)
            written.append(path)
        manifest_path = os.path.join(cfg.out_dir, "manifest.json")
        with open(manifest_path, "w") as handle:
            json.dump(manifest, handle, sort_keys=True, indent=2)
            handle.write("\n")
        written.append(manifest_path)
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except OSError:  # pragma: no cover - best-effort cleanup
                pass
        raise
    log.info("wrote %d files to %s", len(written), cfg.out_dir)
    return ExperimentResult(out_dir=cfg.out_dir, outputs=written, manifest=manifest)
