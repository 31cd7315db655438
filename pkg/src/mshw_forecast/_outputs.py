"""
Result files of a replay run.

    forecasts.csv         t,observed,forecast,model (one row per record)
    metrics.json          the run report without its records
    compare_mape.svg      cumulative MAPE per method
    compare_pred25.svg    cumulative PRED(25) per method
    compare_rmse.svg      cumulative RMSE per method

Every file is rendered in memory first and moved into place atomically, so a
failed run never leaves a partial file behind. Re-emitting the same report
produces byte-identical files.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, List

import matplotlib as mpl

mpl.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from mshw_forecast._exceptions import EmptyReportError, InputError  # noqa: E402
from mshw_forecast._metrics import align_pairs, cumulative_metrics  # noqa: E402
from mshw_forecast._types import RunReport  # noqa: E402

logger = logging.getLogger(__name__)

FORECASTS_FILE = "forecasts.csv"
METRICS_FILE = "metrics.json"
CHART_METRICS = ("mape", "pred25", "rmse")

_LABELS = {"mape": "cumulative MAPE", "pred25": "cumulative PRED(25)", "rmse": "cumulative RMSE"}

_STYLE = {
    "figure.figsize": (8, 4),
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.hashsalt": "mshw-forecast",
    "svg.fonttype": "none",
}


def chart_name(metric: str) -> str:
    return f"compare_{metric}.svg"


def render_forecasts_csv(report: RunReport) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", "observed", "forecast", "model"])
    for record in report.records:
        writer.writerow([record.t, repr(record.observed), repr(record.forecast), record.model_id])
    return buffer.getvalue().encode("utf-8")


def render_metrics_json(report: RunReport) -> bytes:
    summary = report.model_copy(update={"records": []})
    return (summary.model_dump_json(indent=2) + "\n").encode("utf-8")


def load_metrics(path: Path) -> RunReport:
    """Read back a metrics.json written by `emit_outputs`."""
    return RunReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def render_charts(report: RunReport) -> Dict[str, bytes]:
    """One SVG per metric, one line per method."""
    curves = {}
    for method in report.metrics:
        times, pairs = align_pairs(report.records_for(method), report.horizon, start=report.warmup)
        if report.skip_zero_obs:
            times = [t for t, (_, observed) in zip(times, pairs.pairs) if observed != 0.0]
        curves[method] = (
            times,
            cumulative_metrics(
                pairs, eps_floor=report.eps_floor, skip_zero_obs=report.skip_zero_obs
            ),
        )

    charts: Dict[str, bytes] = {}
    with mpl.rc_context(_STYLE):
        for metric in CHART_METRICS:
            fig, ax = plt.subplots()
            try:
                for method, (times, values) in curves.items():
                    ax.plot(times, values[metric], label=method)
                ax.set_xlabel("time (periods)")
                ax.set_ylabel(_LABELS[metric])
                ax.legend(loc="best")
                buffer = io.BytesIO()
                fig.savefig(buffer, format="svg", metadata={"Date": None})
                charts[chart_name(metric)] = buffer.getvalue()
            finally:
                plt.close(fig)
    return charts


def _write_atomic(path: Path, payload: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_outputs(report: RunReport, out_dir: Path) -> List[Path]:
    """
    Write the forecasts, metrics and comparison charts of a run.

    Args:
        report: A finished run.
        out_dir: Target directory, created if missing.

    Returns:
        Paths of the written files.

    Raises:
        EmptyReportError: If the report holds no forecasts; nothing is written.
        InputError: If the directory cannot be written.
    """
    if not report.records:
        raise EmptyReportError("Nothing to write: the report has no forecasts", code="EMPTY_REPORT")

    payloads = {
        FORECASTS_FILE: render_forecasts_csv(report),
        METRICS_FILE: render_metrics_json(report),
    }
    if report.metrics:
        payloads.update(render_charts(report))

    out_dir = Path(out_dir)
    written: List[Path] = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, payload in payloads.items():
            target = out_dir / name
            _write_atomic(target, payload)
            written.append(target)
    except OSError as e:
        raise InputError(f"Cannot write outputs: {e}", code="IO_ERROR", details=str(out_dir)) from e

    logger.info("wrote %d files to %s", len(written), out_dir)
    return written
