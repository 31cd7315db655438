"""
Double and triple exponential smoothing comparators.

Both are thin shells over `ModelState`: double smoothing is the model with no
seasonal pattern, triple smoothing the model with exactly one.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple, Union

from mshw_forecast._abc import tune_from_state, tune_smoothing
from mshw_forecast._exceptions import InsufficientHistoryError
from mshw_forecast._model import (
    ModelState,
    init_batch,
    init_online,
    init_seasonal_indices,
    phase_ring,
)
from mshw_forecast._types import (
    DEFAULT_EPS_FLOOR,
    AbcConfig,
    BaselineKind,
    ForecastRecord,
    SmoothingParams,
)

ParamsInput = Union[SmoothingParams, Sequence[float]]


def _as_params(params: ParamsInput, n_gammas: int) -> SmoothingParams:
    if not isinstance(params, SmoothingParams):
        params = SmoothingParams.from_vector(list(params))
    if len(params.gammas) != n_gammas:
        raise ValueError(f"expected {n_gammas} seasonal constants, got {len(params.gammas)}")
    return params


def _record(state: ModelState, observed: float, k: int, model_id: str) -> ForecastRecord:
    raw = state.raw_forecast(k)
    return ForecastRecord(
        t=state.t,
        observed=observed,
        horizon=k,
        forecast=raw if raw > 0.0 else 0.0,
        raw_forecast=raw,
        model_id=model_id,
    )


def replay_records(
    state: ModelState, x: Sequence[float], k: int, model_id: str
) -> List[ForecastRecord]:
    """Forecast from `state`, then step through `x` forecasting after each value."""
    records = [_record(state, float(x[state.t - 1]), k, model_id)]
    for value in x[state.t :]:
        state.step(float(value))
        records.append(_record(state, float(value), k, model_id))
    return records


def run_double(
    x: Sequence[float],
    params: ParamsInput,
    k: int,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> List[ForecastRecord]:
    """
    Double exponential smoothing forecasts.

    Initialised from the first two observations; the first record is the
    forecast of the initial state at t = 1.
    """
    if len(x) < 2:
        raise InsufficientHistoryError(
            "Double smoothing needs at least 2 observations",
            code="INSUFFICIENT_HISTORY",
            details=f"got {len(x)}",
        )
    state = init_online(
        float(x[0]), float(x[1]), params=_as_params(params, 0), eps_floor=eps_floor
    )
    return replay_records(state, x, k, "double")


def triple_state(
    x: Sequence[float],
    cycle_len: int,
    params: ParamsInput,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> ModelState:
    """
    Batch-initialised single-season state positioned at t = 2L.

    Level and trend come from the first two cycles, indices from ratios to
    the centered moving average over the first three.
    """
    if len(x) < 3 * cycle_len:
        raise InsufficientHistoryError(
            f"Triple smoothing needs at least {3 * cycle_len} observations",
            code="INSUFFICIENT_HISTORY",
            details=f"got {len(x)}",
        )
    smoothing = _as_params(params, 1)
    level, trend = init_batch(x, cycle_len)
    indices = init_seasonal_indices(x, cycle_len, eps_floor=eps_floor)
    state = ModelState(
        level,
        trend,
        params=SmoothingParams(alpha=smoothing.alpha, beta=smoothing.beta),
        t=2 * cycle_len,
        eps_floor=eps_floor,
    )
    return state.add_pattern(cycle_len, phase_ring(indices), smoothing.gammas[0])


def run_triple(
    x: Sequence[float],
    cycle_len: int,
    params: ParamsInput,
    k: int,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> List[ForecastRecord]:
    """Triple (single-season multiplicative) smoothing forecasts from t = 2L."""
    state = triple_state(x, cycle_len, params, eps_floor=eps_floor)
    return replay_records(state, x, k, "triple")


def fit_baseline(
    kind: BaselineKind,
    x: Sequence[float],
    k: int,
    config: Optional[AbcConfig] = None,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> Tuple[SmoothingParams, float]:
    """
    Tune a comparator with the same bee colony and objective the
    multi-seasonal model uses when it gains a cycle.

    Double smoothing replays `x` from x1, x2. Triple smoothing replays the
    same start with its cycle attached as a flat ring, so gamma is scored
    on how well the ring learns from observations.

    Returns:
        (params, mse) of the best point found.

    Raises:
        InsufficientHistoryError: `x` is shorter than three cycles (triple)
            or leaves no forecast with an outcome.
    """
    if kind.kind == "double":
        params, result = tune_smoothing(x, [], k, config, eps_floor=eps_floor)
        return params, result.best_fitness

    assert kind.cycle_len is not None
    if len(x) < 3 * kind.cycle_len:
        raise InsufficientHistoryError(
            f"Triple smoothing needs at least {3 * kind.cycle_len} observations",
            code="INSUFFICIENT_HISTORY",
            details=f"got {len(x)}",
        )
    anchor = init_online(float(x[0]), float(x[1]), eps_floor=eps_floor)
    params, result = tune_from_state(anchor, x, k, config, new_cycles=[kind.cycle_len])
    return params, result.best_fitness
