"""
Online replay of a demand series.

`ReplayStream` absorbs one observation per period and yields the k-step
forecast issued after it, the way a live autoscaler would consume the model:

1. start from x1, x2 and tune (alpha, beta) on the warmup window;
2. for every new observation, test any candidate cycle that is due
   (t = 3·l'), attach detected cycles and re-tune all constants;
3. step the model and forecast k periods ahead.

After warmup, every re-tune replays only the window since the previous one,
starting from the state saved then. A cycle attached in between enters that
replay as a flat ring, so its constant is never fitted to the history its
initial indices were estimated from.

The two comparators run through the same loop: double smoothing never
attaches a cycle; triple smoothing is double smoothing until t = 3·L, then
continues from the batch-initialised single-season state of `baselines`.
"""

from __future__ import annotations

import logging
from typing import Iterator, List, Optional, Sequence

from mshw_forecast._abc import tune_from_state, tune_smoothing
from mshw_forecast._exceptions import (
    ConfigError,
    DegenerateWindowError,
    InsufficientHistoryError,
)
from mshw_forecast._model import (
    ModelState,
    PatternSeed,
    deseasonalize,
    init_online,
    init_seasonal_indices,
    phase_ring,
)
from mshw_forecast._seasonality import detect, due_cycles
from mshw_forecast._types import (
    AbcConfig,
    BaselineKind,
    DetectionEvent,
    DetectionSchedule,
    ForecastRecord,
    PipelineConfig,
    ReoptimizationEvent,
    SmoothingParams,
)
from mshw_forecast.baselines import fit_baseline, triple_state

logger = logging.getLogger(__name__)

# Placeholder gamma for a freshly attached cycle; re-tuned immediately
_INITIAL_GAMMA = 0.5


def abc_seed(base_seed: int, t: int) -> int:
    """Seed of the colony run at time t; equal across methods at equal t."""
    return base_seed * 1_000_003 + t


class ReplayStream:
    """
    Iterator over the forecasts of one method.

    Usage:
        stream = ReplayStream(values, config, method="msholtwinters")
        for record in stream:
            print(record.t, record.forecast)
        stream.detections      # cycles accepted along the way
        stream.reoptimizations # every bee colony run
    """

    def __init__(self, values: Sequence[float], config: PipelineConfig, method: str):
        """
        Initialize the replay.

        Args:
            values: The demand series, oldest first.
            config: Horizon, warmup, cycle candidates and colony settings.
            method: "msholtwinters", "double" or "triple".
        """
        self._x: List[float] = [float(v) for v in values]
        self._config = config
        self._method = method
        self._horizon = config.horizon
        self._eps = config.eps_floor

        if len(self._x) <= config.warmup + config.horizon:
            raise InsufficientHistoryError(
                "Series too short to score any forecast",
                code="INSUFFICIENT_HISTORY",
                details=f"length={len(self._x)}, warmup={config.warmup}, horizon={config.horizon}",
            )
        if config.warmup < config.horizon + 2:
            raise ConfigError(
                "Warmup must exceed the horizon by at least 2 to tune on it",
                code="BAD_WARMUP",
                details=f"warmup={config.warmup}, horizon={config.horizon}",
            )

        self._schedule: Optional[DetectionSchedule] = None
        self._forced_cycle: Optional[int] = None
        if method == "msholtwinters":
            self._schedule = DetectionSchedule(
                expected_cycles=list(config.expected_cycles),
                threshold=config.threshold,
                retest=config.retest,
            )
        elif method == "triple":
            self._forced_cycle = config.season_for_triple
            if self._forced_cycle is None:
                raise ConfigError(
                    "Triple smoothing needs a season length",
                    code="NO_SEASON",
                    details="pass --triple-cycle or at least one expected cycle",
                )

        self._seeds: List[PatternSeed] = []
        self.records: List[ForecastRecord] = []
        self.detections: List[DetectionEvent] = []
        self.reoptimizations: List[ReoptimizationEvent] = []

        self._state: ModelState = init_online(self._x[0], self._x[1], eps_floor=self._eps)
        self._anchor: Optional[ModelState] = None
        self._reoptimize(self._x[: config.warmup], time=config.warmup, trigger="warmup")
        self._position = 0

    @property
    def method(self) -> str:
        return self._method

    @property
    def state(self) -> ModelState:
        return self._state

    @property
    def params(self) -> SmoothingParams:
        return self._state.params

    @property
    def values(self) -> List[float]:
        return self._x

    def __iter__(self) -> Iterator[ForecastRecord]:
        return self

    def __next__(self) -> ForecastRecord:
        position = self._position
        if position >= len(self._x):
            raise StopIteration
        self._position += 1

        if position > 0:
            t = position + 1
            self._before_step(t)
            self._state.step(self._x[position])
        record = self._record(self._x[position])
        self.records.append(record)
        return record

    def run(self) -> "ReplayStream":
        """Consume the whole series."""
        for _ in self:
            pass
        return self

    def _record(self, observed: float) -> ForecastRecord:
        raw = self._state.raw_forecast(self._horizon)
        return ForecastRecord(
            t=self._state.t,
            observed=observed,
            horizon=self._horizon,
            forecast=raw if raw > 0.0 else 0.0,
            raw_forecast=raw,
            model_id=self._method,
        )

    def _before_step(self, t: int) -> None:
        """Seasonality tests and re-tuning due when x_t arrives."""
        config = self._config
        retuned = False

        if self._schedule is not None and due_cycles(t, self._schedule):
            history = self._x[:t]
            found = detect(history, t, self._schedule, self._state.cycle_lengths)
            if found is not None:
                cycle_len, coefficient = found
                if self._attach(history, cycle_len):
                    self.detections.append(
                        DetectionEvent(
                            method=self._method, cycle_len=cycle_len, time=t, coefficient=coefficient
                        )
                    )
                    logger.info(
                        "%s: detected cycle %d at t=%d (r=%.3f)",
                        self._method, cycle_len, t, coefficient,
                    )
                    self._reoptimize(history, time=t, trigger="detection")
                    retuned = True

        if (
            self._forced_cycle is not None
            and t == 3 * self._forced_cycle
            and self._forced_cycle not in self._state.cycle_lengths
        ):
            retuned = self._start_season(t, self._forced_cycle)

        if (
            not retuned
            and config.reopt_every is not None
            and t > config.warmup
            and t % config.reopt_every == 0
        ):
            self._reoptimize(self._x[:t], time=t, trigger="periodic")

    def _attach(self, history: Sequence[float], cycle_len: int) -> bool:
        """Initialise and attach a cycle; False when its window is degenerate."""
        base = deseasonalize(history, self._seeds)
        try:
            indices = init_seasonal_indices(base, cycle_len, eps_floor=self._eps)
        except DegenerateWindowError as e:
            logger.warning("%s: cannot initialise cycle %d: %s", self._method, cycle_len, e)
            return False
        self._seeds.append((cycle_len, indices))
        self._state.add_pattern(cycle_len, phase_ring(indices), _INITIAL_GAMMA)
        return True

    def _start_season(self, t: int, cycle_len: int) -> bool:
        """
        Switch the triple comparator to its batch-initialised state.

        The state is built from x_1..x_t at period 2L, tuned with
        `fit_baseline` and stepped through the periods it has not absorbed,
        so it ends at t - 1 like the state it replaces.
        """
        history = self._x[:t]
        kind = BaselineKind(kind="triple", cycle_len=cycle_len)
        try:
            params, mse = fit_baseline(
                kind, history, self._horizon, self._abc_config(t), eps_floor=self._eps
            )
            state = triple_state(history, cycle_len, params, eps_floor=self._eps)
        except (DegenerateWindowError, InsufficientHistoryError) as e:
            logger.warning("%s: cannot start season %d: %s", self._method, cycle_len, e)
            return False

        for value in self._x[state.t : t - 1]:
            state.step(value)
        self._state = state
        self._anchor = state.copy()
        self.reoptimizations.append(
            ReoptimizationEvent(
                method=self._method, time=t, trigger="season", params=params, mse=mse
            )
        )
        logger.info("%s: started season %d at t=%d", self._method, cycle_len, t)
        return True

    def _abc_config(self, time: int) -> AbcConfig:
        return self._config.abc.model_copy(update={"seed": abc_seed(self._config.seed, time)})

    def _reoptimize(self, history: Sequence[float], *, time: int, trigger: str) -> None:
        """
        Re-tune every constant.

        The warmup run fits the warmup window from x1, x2. Later runs replay
        the window since the saved anchor state.
        """
        abc = self._abc_config(time)
        try:
            if self._anchor is None:
                params, result = tune_smoothing(
                    history, self._seeds, self._horizon, abc, eps_floor=self._eps
                )
            else:
                params, result = tune_from_state(
                    self._anchor,
                    history,
                    self._horizon,
                    abc,
                    new_cycles=self._state.cycle_lengths[self._anchor.n :],
                )
        except InsufficientHistoryError as e:
            if trigger == "warmup":
                raise
            logger.warning("%s: keeping constants at t=%d: %s", self._method, time, e)
            return
        self._state.set_params(params)
        self._anchor = self._state.copy()
        self.reoptimizations.append(
            ReoptimizationEvent(
                method=self._method,
                time=time,
                trigger=trigger,
                params=params,
                mse=result.best_fitness,
            )
        )
