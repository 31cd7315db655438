"""
Seasonality test for candidate cycle lengths.

A candidate length l' is tested once three full cycles of history exist
(t = 3·l'), using the sample autocorrelation at lag l' on the raw series.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from mshw_forecast._exceptions import LagTooLargeError
from mshw_forecast._types import DetectionSchedule

logger = logging.getLogger(__name__)


def autocorrelation(x: Sequence[float], lag: int) -> float:
    """
    Biased sample autocorrelation at `lag`.

    Uses the global mean and the full-series sum of squares as denominator.
    A constant series has no variance and yields 0.
    """
    values = np.asarray(x, dtype=float)
    if lag < 1 or lag >= values.size:
        raise LagTooLargeError(
            f"Lag {lag} does not fit a series of length {values.size}",
            code="LAG_TOO_LARGE",
        )
    if np.ptp(values) == 0.0:
        return 0.0
    deviations = values - values.mean()
    denominator = float(np.dot(deviations, deviations))
    if denominator == 0.0:
        return 0.0
    numerator = float(np.dot(deviations[:-lag], deviations[lag:]))
    return numerator / denominator


def due_cycles(t: int, schedule: DetectionSchedule) -> Tuple[int, ...]:
    """Candidate lengths whose test falls on time `t`."""
    due = []
    for cycle_len in schedule.expected_cycles:
        if cycle_len in schedule.tested:
            if schedule.retest and t > 3 * cycle_len and t % cycle_len == 0:
                due.append(cycle_len)
        elif t == 3 * cycle_len:
            due.append(cycle_len)
    return tuple(due)


def run_cycle_test(x: Sequence[float], cycle_len: int, threshold: float) -> Tuple[bool, float]:
    """Run the autocorrelation test for one candidate; returns (accepted, r)."""
    coefficient = autocorrelation(x, cycle_len)
    logger.debug(
        "seasonality test: cycle=%d length=%d r=%.4f (raw series; a trend inflates r)",
        cycle_len,
        len(x),
        coefficient,
    )
    return coefficient >= threshold, coefficient


def maybe_detect(
    x: Sequence[float],
    t: int,
    schedule: DetectionSchedule,
    active: Sequence[int],
) -> Optional[int]:
    """
    Test the candidate cycle due at time `t`, if any.

    Args:
        x: History up to and including period t.
        t: Current series length.
        schedule: Candidate lengths; tested candidates are recorded in it.
        active: Cycle lengths already in the model.

    Returns:
        The accepted cycle length, or None.
    """
    detection = detect(x, t, schedule, active)
    return detection[0] if detection is not None else None


def detect(
    x: Sequence[float],
    t: int,
    schedule: DetectionSchedule,
    active: Sequence[int],
) -> Optional[Tuple[int, float]]:
    """Like `maybe_detect` but also returns the autocorrelation coefficient."""
    for cycle_len in due_cycles(t, schedule):
        schedule.tested.add(cycle_len)
        if cycle_len in active:
            continue
        accepted, coefficient = run_cycle_test(x, cycle_len, schedule.threshold)
        if accepted:
            return cycle_len, coefficient
    return None
