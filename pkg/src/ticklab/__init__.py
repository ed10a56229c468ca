"""Tick-grid coarse-graining, clustering estimators, and trade clocks."""

__version__ = "0.1.0"

from .arch import (
    ArchParams,
    CoarseGrainResult,
    CoarseGrainSweep,
    coarse_grain_experiment,
    default_sweep,
    observed_returns,
    simulate_arch,
)
from .clocks import (
    BinnedReturns,
    ClockSpec,
    TradeRecord,
    Trades,
    bin_real_time,
    bin_returns,
    bin_transaction_time,
    mean_transactions_per_bin,
    shuffle_transaction_time,
    trade_returns,
)
from .errors import (
    ConfigError,
    DegenerateDataError,
    DegenerateTailError,
    InsufficientDataError,
    InternalConsistencyError,
    PanelMismatchError,
    ParameterError,
    SchemaError,
    TickLabError,
    ZeroVarianceError,
)
from .estimators import (
    AcfEstimator,
    DfaHurst,
    EmpiricalCcdf,
    HillEstimator,
    ZeroReturnFrequency,
    acf,
    ccdf,
    dfa_hurst,
    hill,
    zero_frequency,
)
from .io import IngestReport, TradeCsvSchema, load_trades_csv
from .panel import PanelDifference, TTestResult, build_panel, paired_one_sided_ttest
from .seeds import stage_rng, stage_seed
from .series import (
    PriceSeries,
    ReturnSeries,
    TickDiscretizer,
    TickGrid,
    discretize,
    integrate,
    returns,
)
from .synth import SynthTradeParams, synth_trades

__all__ = [
    "__version__",
    "ArchParams",
    "CoarseGrainResult",
    "CoarseGrainSweep",
    "coarse_grain_experiment",
    "default_sweep",
    "observed_returns",
    "simulate_arch",
    "BinnedReturns",
    "ClockSpec",
    "TradeRecord",
    "Trades",
    "bin_real_time",
    "bin_returns",
    "bin_transaction_time",
    "mean_transactions_per_bin",
    "shuffle_transaction_time",
    "trade_returns",
    "ConfigError",
    "DegenerateDataError",
    "DegenerateTailError",
    "InsufficientDataError",
    "InternalConsistencyError",
    "PanelMismatchError",
    "ParameterError",
    "SchemaError",
    "TickLabError",
    "ZeroVarianceError",
    "AcfEstimator",
    "DfaHurst",
    "EmpiricalCcdf",
    "HillEstimator",
    "ZeroReturnFrequency",
    "acf",
    "ccdf",
    "dfa_hurst",
    "hill",
    "zero_frequency",
    "IngestReport",
    "TradeCsvSchema",
    "load_trades_csv",
    "PanelDifference",
    "TTestResult",
    "build_panel",
    "paired_one_sided_ttest",
    "stage_rng",
    "stage_seed",
    "PriceSeries",
    "ReturnSeries",
    "TickDiscretizer",
    "TickGrid",
    "discretize",
    "integrate",
    "returns",
    "SynthTradeParams",
    "synth_trades",
]
