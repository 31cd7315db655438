"""Accuracy metrics over aligned (forecast, observed) pairs."""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from mshw_forecast._exceptions import EmptyInputError
from mshw_forecast._types import DEFAULT_EPS_FLOOR, EvalPairs, ForecastRecord, MethodMetrics

PairsInput = Union[EvalPairs, Sequence[Tuple[float, float]]]


def _as_arrays(
    pairs: PairsInput, *, skip_zero_obs: bool = False
) -> Tuple[np.ndarray, np.ndarray]:
    rows = pairs.pairs if isinstance(pairs, EvalPairs) else pairs
    data = np.asarray(rows, dtype=float).reshape(-1, 2)
    if skip_zero_obs:
        data = data[data[:, 1] != 0.0]
    if data.shape[0] == 0:
        raise EmptyInputError("No (forecast, observed) pairs to score", code="EMPTY_INPUT")
    return data[:, 0], data[:, 1]


def _relative_errors(
    forecast: np.ndarray, observed: np.ndarray, eps_floor: float
) -> np.ndarray:
    # Zero-demand periods are scored against eps_floor rather than dropped
    return np.abs(forecast - observed) / np.maximum(observed, eps_floor)


def mape(
    pairs: PairsInput,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
    skip_zero_obs: bool = False,
) -> float:
    """Mean absolute percentage error, as a fraction (0.1 means 10%)."""
    forecast, observed = _as_arrays(pairs, skip_zero_obs=skip_zero_obs)
    return float(np.mean(_relative_errors(forecast, observed, eps_floor)))


def pred25(
    pairs: PairsInput,
    threshold: float = 0.25,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
    skip_zero_obs: bool = False,
) -> float:
    """Fraction of pairs whose relative error is strictly below `threshold`."""
    forecast, observed = _as_arrays(pairs, skip_zero_obs=skip_zero_obs)
    hits = _relative_errors(forecast, observed, eps_floor) < threshold
    return float(np.mean(hits))


def mse(pairs: PairsInput) -> float:
    """Mean squared error."""
    forecast, observed = _as_arrays(pairs)
    return float(np.mean((forecast - observed) ** 2))


def rmse(pairs: PairsInput) -> float:
    """Root mean squared error; always exactly sqrt(mse)."""
    return math.sqrt(mse(pairs))


def cumulative_metrics(
    pairs: PairsInput,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
    skip_zero_obs: bool = False,
) -> Dict[str, np.ndarray]:
    """
    Running MAPE, PRED(25) and RMSE over every prefix of `pairs`.

    Entry i of each curve equals the batch metric of the first i + 1 pairs.
    """
    forecast, observed = _as_arrays(pairs, skip_zero_obs=skip_zero_obs)
    counts = np.arange(1, forecast.size + 1, dtype=float)
    relative = _relative_errors(forecast, observed, eps_floor)
    squared = (forecast - observed) ** 2
    return {
        "mape": np.cumsum(relative) / counts,
        "pred25": np.cumsum(relative < 0.25) / counts,
        "rmse": np.sqrt(np.cumsum(squared) / counts),
    }


def summarize(
    pairs: PairsInput,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
    skip_zero_obs: bool = False,
) -> MethodMetrics:
    """All final metrics of one method."""
    forecast, _ = _as_arrays(pairs)
    squared_mean = mse(pairs)
    return MethodMetrics(
        mape=mape(pairs, eps_floor=eps_floor, skip_zero_obs=skip_zero_obs),
        pred25=pred25(pairs, eps_floor=eps_floor, skip_zero_obs=skip_zero_obs),
        rmse=math.sqrt(squared_mean),
        mse=squared_mean,
        pairs=int(forecast.size),
    )


def align_pairs(
    records: Sequence[ForecastRecord], horizon: int, *, start: int
) -> Tuple[List[int], EvalPairs]:
    """
    Pair each forecast issued at t >= `start` with the observation at t + k.

    Records must come from one method and cover every period; forecasts whose
    outcome lies past the end of the series are left out.

    Returns:
        (issue times, pairs) in time order.
    """
    observed = {r.t: r.observed for r in records}
    times: List[int] = []
    rows: List[Tuple[float, float]] = []
    for record in sorted(records, key=lambda r: r.t):
        outcome = observed.get(record.t + horizon)
        if record.t < start or outcome is None:
            continue
        times.append(record.t)
        rows.append((record.forecast, outcome))
    return times, EvalPairs(pairs=rows)
