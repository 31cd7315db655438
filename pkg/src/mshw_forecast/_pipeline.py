"""
End-to-end replay: load a trace, run each method online, score and emit.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from mshw_forecast._exceptions import InsufficientHistoryError
from mshw_forecast._metrics import align_pairs, summarize
from mshw_forecast._outputs import emit_outputs
from mshw_forecast._streaming import ReplayStream
from mshw_forecast._types import (
    DemandSeries,
    DetectionEvent,
    ForecastRecord,
    IngestReport,
    MethodMetrics,
    PipelineConfig,
    ReoptimizationEvent,
    RunReport,
    SmoothingParams,
)
from mshw_forecast.ingest import load_demand

logger = logging.getLogger(__name__)


class ReplayPipeline:
    """
    Replay runner for one configuration.

    Usage:
        pipeline = ReplayPipeline(PipelineConfig(input_path=Path("access_log")))
        report = pipeline.run()
        print(report.metrics["msholtwinters"].mape)
    """

    def __init__(self, config: PipelineConfig):
        self.config = config

    def load(self) -> Tuple[DemandSeries, IngestReport]:
        """Read the configured input into a per-minute series."""
        config = self.config
        return load_demand(
            config.input_path,
            config.input_format,
            unit=config.unit,
            capacity_per_cpu=config.capacity_per_cpu,
            workers=config.ingest_workers,
        )

    def replay(self, values: Sequence[float], method: str) -> ReplayStream:
        """Run one method over the whole series."""
        logger.info("replaying %d observations with %s", len(values), method)
        return ReplayStream(values, self.config, method).run()

    def run_values(
        self, values: Sequence[float], ingest: Optional[IngestReport] = None
    ) -> RunReport:
        """
        Replay every configured method over an in-memory series and score it.

        Raises:
            InsufficientHistoryError: If no forecast past warmup has an outcome.
        """
        config = self.config
        if len(values) <= config.warmup + config.horizon:
            raise InsufficientHistoryError(
                "Series too short to score any forecast",
                code="INSUFFICIENT_HISTORY",
                details=f"length={len(values)}, warmup={config.warmup}, horizon={config.horizon}",
            )

        records: List[ForecastRecord] = []
        detections: List[DetectionEvent] = []
        reoptimizations: List[ReoptimizationEvent] = []
        metrics: Dict[str, MethodMetrics] = {}
        final_params: Dict[str, SmoothingParams] = {}

        for method in config.methods:
            stream = self.replay(values, method)
            records.extend(stream.records)
            detections.extend(stream.detections)
            reoptimizations.extend(stream.reoptimizations)
            final_params[method] = stream.params

            _, pairs = align_pairs(stream.records, config.horizon, start=config.warmup)
            metrics[method] = summarize(
                pairs, eps_floor=config.eps_floor, skip_zero_obs=config.skip_zero_obs
            )
            logger.info(
                "%s: mape=%.4f pred25=%.4f rmse=%.4f over %d forecasts",
                method,
                metrics[method].mape,
                metrics[method].pred25,
                metrics[method].rmse,
                metrics[method].pairs,
            )

        return RunReport(
            records=records,
            detected_cycles=detections,
            reoptimizations=reoptimizations,
            metrics=metrics,
            final_params=final_params,
            ingest=ingest if ingest is not None else IngestReport(),
            horizon=config.horizon,
            warmup=config.warmup,
            eps_floor=config.eps_floor,
            skip_zero_obs=config.skip_zero_obs,
        )

    def run(self, *, write: bool = True) -> RunReport:
        """Load, replay, score and (optionally) write the outputs."""
        series, ingest = self.load()
        report = self.run_values(series.values, ingest)
        if write:
            emit_outputs(report, self.config.out_dir)
        return report


def run_pipeline(config: PipelineConfig, *, write: bool = True) -> RunReport:
    """Run the configured replay; see `ReplayPipeline.run`."""
    return ReplayPipeline(config).run(write=write)
