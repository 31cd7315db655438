"""
mshw-forecast - multi-seasonal Holt-Winters forecasting of web workload.

This package predicts per-minute request (or CPU) demand for autoscaling. The
model starts as plain double exponential smoothing and attaches a seasonal
cycle (daily, weekly, ...) whenever the autocorrelation of the history at that
lag clears a threshold; its smoothing constants are tuned by a bee colony
search whenever the model structure changes.

Usage:
    from mshw_forecast import PipelineConfig, run_pipeline

    report = run_pipeline(PipelineConfig(input_path="access_log.gz", compare=True))
    print(report.metrics["msholtwinters"].mape)

    # Step-by-step replay over an in-memory series
    from mshw_forecast import ReplayStream
    for record in ReplayStream(values, config, "msholtwinters"):
        print(record.t, record.forecast)
"""

from mshw_forecast._abc import (
    BeeColony,
    local_search,
    optimize,
    tune_from_state,
    tune_smoothing,
)
from mshw_forecast._exceptions import (
    ConfigError,
    DegenerateWindowError,
    DuplicateCycleError,
    EmptyInputError,
    EmptyReportError,
    ForecastError,
    InputError,
    InsufficientHistoryError,
    LagTooLargeError,
    exit_code_for,
)
from mshw_forecast._metrics import align_pairs, cumulative_metrics, mape, mse, pred25, rmse, summarize
from mshw_forecast._model import (
    ModelState,
    SeasonalPattern,
    add_pattern,
    build_state,
    deseasonalize,
    forecast,
    init_batch,
    init_online,
    init_seasonal_indices,
    phase_ring,
    replay_mse,
    seasonal_product,
    snapshot_mse,
    step,
)
from mshw_forecast._outputs import emit_outputs, load_metrics
from mshw_forecast._pipeline import ReplayPipeline, run_pipeline
from mshw_forecast._seasonality import autocorrelation, detect, due_cycles, maybe_detect
from mshw_forecast._streaming import ReplayStream
from mshw_forecast._types import (
    AbcConfig,
    AbcResult,
    BaselineKind,
    Bee,
    DemandSeries,
    DetectionEvent,
    DetectionSchedule,
    EvalPairs,
    ForecastRecord,
    IngestReport,
    MethodMetrics,
    PipelineConfig,
    ReoptimizationEvent,
    RunReport,
    SmoothingParams,
)
from mshw_forecast.baselines import fit_baseline, run_double, run_triple
from mshw_forecast.ingest import (
    aggregate_per_minute,
    cpu_demand,
    load_clf,
    load_demand,
    load_series_csv,
    parse_clf_line,
    read_series_csv,
    write_series_csv,
)

__version__ = "0.1.0"

__all__ = [
    # Pipeline
    "ReplayPipeline",
    "run_pipeline",
    "emit_outputs",
    "load_metrics",
    # Streaming
    "ReplayStream",
    # Model
    "ModelState",
    "SeasonalPattern",
    "init_online",
    "init_batch",
    "init_seasonal_indices",
    "phase_ring",
    "deseasonalize",
    "seasonal_product",
    "step",
    "forecast",
    "add_pattern",
    "build_state",
    "replay_mse",
    "snapshot_mse",
    # Seasonality
    "autocorrelation",
    "due_cycles",
    "detect",
    "maybe_detect",
    # Optimization
    "BeeColony",
    "local_search",
    "optimize",
    "tune_smoothing",
    "tune_from_state",
    # Baselines
    "run_double",
    "run_triple",
    "fit_baseline",
    # Metrics
    "mape",
    "pred25",
    "mse",
    "rmse",
    "summarize",
    "cumulative_metrics",
    "align_pairs",
    # Ingestion
    "parse_clf_line",
    "load_clf",
    "aggregate_per_minute",
    "cpu_demand",
    "load_series_csv",
    "read_series_csv",
    "write_series_csv",
    "load_demand",
    # Types
    "SmoothingParams",
    "AbcConfig",
    "AbcResult",
    "Bee",
    "ForecastRecord",
    "DetectionSchedule",
    "BaselineKind",
    "EvalPairs",
    "DemandSeries",
    "IngestReport",
    "PipelineConfig",
    "DetectionEvent",
    "ReoptimizationEvent",
    "MethodMetrics",
    "RunReport",
    # Exceptions
    "ForecastError",
    "InsufficientHistoryError",
    "DegenerateWindowError",
    "DuplicateCycleError",
    "LagTooLargeError",
    "EmptyInputError",
    "EmptyReportError",
    "ConfigError",
    "InputError",
    "exit_code_for",
]
