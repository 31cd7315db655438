"""
Access-log ingestion.

Turns Common Log Format traces (NASA, ClarkNet, Saskatchewan, ...) into a
per-minute demand series, and reads or writes pre-aggregated series as CSV.

Example line:
    h1 - - [01/Jun/1995:00:00:59 -0600] "GET / HTTP/1.0" 200 1839
"""

from __future__ import annotations

import csv
import gzip
import logging
import math
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import IO, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from mshw_forecast._exceptions import EmptyInputError, InputError
from mshw_forecast._types import DemandSeries, IngestReport

logger = logging.getLogger(__name__)

DEFAULT_CAPACITY = 60.0

_CLF_TIMESTAMP = re.compile(
    r"\[(?P<day>\d{2})/(?P<month>[A-Za-z]{3})/(?P<year>\d{4})"
    r":(?P<hour>\d{2}):(?P<minute>\d{2}):(?P<second>\d{2})"
    r" (?P<sign>[+-])(?P<tz_hours>\d{2})(?P<tz_minutes>\d{2})\]"
)

_MONTHS = {
    name: number
    for number, name in enumerate(
        ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"],
        start=1,
    )
}

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def parse_clf_line(line: str) -> Optional[datetime]:
    """
    Extract the bracketed timestamp of a CLF line, normalised to UTC.

    Returns:
        An aware UTC datetime, or None when the line has no valid timestamp.
    """
    match = _CLF_TIMESTAMP.search(line)
    if match is None:
        return None
    groups = match.groupdict()
    month = _MONTHS.get(groups["month"].lower())
    if month is None:
        return None
    offset = timedelta(hours=int(groups["tz_hours"]), minutes=int(groups["tz_minutes"]))
    if groups["sign"] == "-":
        offset = -offset
    try:
        local = datetime(
            int(groups["year"]),
            month,
            int(groups["day"]),
            int(groups["hour"]),
            int(groups["minute"]),
            int(groups["second"]),
            tzinfo=timezone(offset),
        )
    except ValueError:
        return None
    return local.astimezone(timezone.utc)


def parse_lines(lines: Iterable[str]) -> Tuple[List[datetime], IngestReport]:
    """Parse log lines; malformed lines are counted and skipped."""
    timestamps: List[datetime] = []
    total = 0
    for line in lines:
        total += 1
        ts = parse_clf_line(line)
        if ts is not None:
            timestamps.append(ts)
    report = IngestReport(
        lines_total=total,
        lines_parsed=len(timestamps),
        lines_skipped=total - len(timestamps),
        first_ts=min(timestamps) if timestamps else None,
        last_ts=max(timestamps) if timestamps else None,
    )
    return timestamps, report


def merge_reports(reports: Sequence[IngestReport]) -> IngestReport:
    firsts = [r.first_ts for r in reports if r.first_ts is not None]
    lasts = [r.last_ts for r in reports if r.last_ts is not None]
    return IngestReport(
        lines_total=sum(r.lines_total for r in reports),
        lines_parsed=sum(r.lines_parsed for r in reports),
        lines_skipped=sum(r.lines_skipped for r in reports),
        first_ts=min(firsts) if firsts else None,
        last_ts=max(lasts) if lasts else None,
    )


def _open_text(path: Path) -> IO[str]:
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="latin-1", errors="replace")
    return open(path, encoding="latin-1", errors="replace")


def load_clf(
    path: Path,
    *,
    workers: int = 1,
    chunk_size: int = 100_000,
) -> Tuple[List[datetime], IngestReport]:
    """
    Parse a CLF file (plain or gzipped).

    Chunks are parsed concurrently when `workers` > 1 and merged in file
    order, so the result does not depend on scheduling.
    """
    path = Path(path)
    try:
        with _open_text(path) as handle:
            lines = handle.read().splitlines()
    except OSError as e:
        raise InputError(f"Cannot read log: {e}", code="IO_ERROR", details=str(path)) from e

    chunks = [lines[i : i + chunk_size] for i in range(0, len(lines), chunk_size)] or [[]]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(parse_lines, chunks))
    else:
        results = [parse_lines(chunk) for chunk in chunks]

    timestamps = [ts for chunk_ts, _ in results for ts in chunk_ts]
    report = merge_reports([r for _, r in results])
    logger.info(
        "parsed %s: %d lines, %d skipped",
        path,
        report.lines_total,
        report.lines_skipped,
    )
    if report.lines_skipped:
        logger.warning("%d malformed lines skipped in %s", report.lines_skipped, path)
    return timestamps, report


def _floor_minute(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(second=0, microsecond=0)


def aggregate_per_minute(
    timestamps: Sequence[datetime],
    time_range: Optional[Tuple[datetime, datetime]] = None,
) -> DemandSeries:
    """
    Count requests per UTC minute, zero-filling empty minutes.

    Args:
        timestamps: Request times.
        time_range: Inclusive (start, end); defaults to the first and last
            observed minute. Timestamps outside it are ignored.
    """
    if time_range is None:
        if not timestamps:
            raise EmptyInputError("No timestamps and no range to aggregate", code="EMPTY_INPUT")
        minutes = [_floor_minute(ts) for ts in timestamps]
        start, end = min(minutes), max(minutes)
    else:
        minutes = [_floor_minute(ts) for ts in timestamps]
        start, end = _floor_minute(time_range[0]), _floor_minute(time_range[1])
        if end < start:
            raise ValueError("time range end precedes its start")

    size = int((end - start).total_seconds() // 60) + 1
    counts = Counter(int((m - start).total_seconds() // 60) for m in minutes)
    values = [float(counts.get(i, 0)) for i in range(size)]
    return DemandSeries(start_minute=start, values=values, unit="requests")


def cpu_demand(series: DemandSeries, capacity_per_cpu: float = DEFAULT_CAPACITY) -> DemandSeries:
    """CPU units needed per minute: ceil(requests / capacity_per_cpu)."""
    if capacity_per_cpu <= 0:
        raise ValueError("capacity_per_cpu must be positive")
    if series.unit != "requests":
        raise ValueError("cpu_demand expects a request-count series")
    units = np.ceil(np.asarray(series.values, dtype=float) / capacity_per_cpu)
    return DemandSeries(start_minute=series.start_minute, values=units.tolist(), unit="cpu_units")


def read_series_csv(path: Path) -> Tuple[DemandSeries, IngestReport]:
    """
    Read a pre-aggregated `minute_index,value` CSV (header optional).

    Missing indices are filled with 0; the series starts at the Unix epoch
    plus the smallest index in minutes. The report counts the data rows
    actually present in the file, not the filled minutes.

    Raises:
        InputError: a row is malformed, duplicated, negative or not finite.
        EmptyInputError: the file has no data rows.
    """
    path = Path(path)
    rows: Dict[int, float] = {}
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            for line_no, row in enumerate(csv.reader(handle), start=1):
                if not row or not row[0].strip():
                    continue
                try:
                    index, value = int(row[0]), float(row[1])
                except (ValueError, IndexError):
                    if line_no == 1:
                        continue
                    raise InputError(
                        f"Malformed series row {line_no}", code="BAD_ROW", details=str(path)
                    ) from None
                if index in rows:
                    raise InputError(
                        f"Duplicate minute index {index}", code="BAD_ROW", details=str(path)
                    )
                if not math.isfinite(value):
                    raise InputError(
                        f"Non-finite demand at minute {index}", code="BAD_ROW", details=str(path)
                    )
                if value < 0:
                    raise InputError(
                        f"Negative demand at minute {index}", code="BAD_ROW", details=str(path)
                    )
                rows[index] = value
    except OSError as e:
        raise InputError(f"Cannot read series: {e}", code="IO_ERROR", details=str(path)) from e

    if not rows:
        raise EmptyInputError("Series file has no data rows", code="EMPTY_INPUT", details=str(path))
    first, last = min(rows), max(rows)
    values = [rows.get(i, 0.0) for i in range(first, last + 1)]
    series = DemandSeries(start_minute=_EPOCH + timedelta(minutes=first), values=values)
    report = IngestReport(
        lines_total=len(rows),
        lines_parsed=len(rows),
        lines_skipped=0,
        first_ts=series.start_minute,
        last_ts=series.timestamps()[-1],
    )
    return series, report


def load_series_csv(path: Path) -> DemandSeries:
    """Read a pre-aggregated series; see `read_series_csv`."""
    return read_series_csv(path)[0]


def write_series_csv(series: DemandSeries, path: Path) -> None:
    """Write a series as `timestamp,value` rows with ISO-8601 UTC timestamps."""
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["timestamp", "value"])
            for ts, value in zip(series.timestamps(), series.values):
                writer.writerow([ts.strftime("%Y-%m-%dT%H:%M:%SZ"), repr(value)])
    except OSError as e:
        raise InputError(f"Cannot write series: {e}", code="IO_ERROR", details=str(path)) from e


def load_demand(
    path: Path,
    input_format: str,
    *,
    unit: str = "requests",
    capacity_per_cpu: float = DEFAULT_CAPACITY,
    workers: int = 1,
) -> Tuple[DemandSeries, IngestReport]:
    """Read an input file into the series the forecaster replays."""
    if input_format == "clf":
        timestamps, report = load_clf(path, workers=workers)
        if not timestamps:
            raise EmptyInputError("No parsable log lines", code="EMPTY_INPUT", details=str(path))
        series = aggregate_per_minute(timestamps)
    else:
        series, report = read_series_csv(path)
    if unit == "cpu_units":
        series = cpu_demand(series, capacity_per_cpu)
    return series, report
