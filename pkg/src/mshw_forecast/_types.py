"""
Type definitions for mshw-forecast.

These Pydantic models carry the value-like records that flow between the
model, the optimizer, the replay driver and the output writers. The live
Holt-Winters state itself lives in `_model.py` as a plain mutable class.
"""

from __future__ import annotations

from datetime import datetime, timedelta
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator
from typing_extensions import Literal

# Lower bound used for level, seasonal indices, observations and
# zero-demand denominators
DEFAULT_EPS_FLOOR = 1e-6

# Smallest admissible smoothing constant; (0, 1] is searched as [1e-4, 1]
PARAM_LOWER_BOUND = 1e-4

Method = Literal["msholtwinters", "double", "triple"]
Unit = Literal["requests", "cpu_units"]

METHODS: Tuple[str, ...] = ("msholtwinters", "double", "triple")


def _check_cycles(cycles: List[int]) -> List[int]:
    for prev, cur in zip(cycles, cycles[1:]):
        if cur <= prev:
            raise ValueError("expected cycles must be strictly increasing")
    if any(c < 2 for c in cycles):
        raise ValueError("expected cycles must all be >= 2")
    return cycles


# =====================
# Smoothing Parameters
# =====================


class SmoothingParams(BaseModel):
    """
    Smoothing constants of the multi-seasonal model.

    Key Parameters:
    --------------
    - alpha: level smoothing
    - beta: trend smoothing
    - gammas: one seasonal smoothing constant per active pattern, in the
      order the patterns were added
    """

    model_config = {"frozen": True}

    alpha: float = Field(gt=0.0, le=1.0, description="Level smoothing constant")
    beta: float = Field(gt=0.0, le=1.0, description="Trend smoothing constant")
    gammas: List[float] = Field(
        default_factory=list, description="Seasonal smoothing constants"
    )

    @field_validator("gammas")
    @classmethod
    def _gammas_in_range(cls, value: List[float]) -> List[float]:
        for gamma in value:
            if not 0.0 < gamma <= 1.0:
                raise ValueError(f"gamma {gamma} outside (0, 1]")
        return value

    @property
    def dim(self) -> int:
        """Length of the optimizable vector (alpha, beta, gamma_1..gamma_n)."""
        return 2 + len(self.gammas)

    def as_vector(self) -> List[float]:
        return [self.alpha, self.beta, *self.gammas]

    @classmethod
    def from_vector(cls, vector: List[float]) -> "SmoothingParams":
        """Build parameters from an optimizer position (alpha, beta, gammas...)."""
        if len(vector) < 2:
            raise ValueError("a parameter vector needs at least alpha and beta")
        return cls(alpha=vector[0], beta=vector[1], gammas=list(vector[2:]))


# =====================
# Optimizer Types
# =====================


class AbcConfig(BaseModel):
    """
    Bee colony sizing and termination settings.

    Key Parameters:
    --------------
    - ns: scout bees scattered at random each iteration
    - nb / ne: best sites and, among them, elite sites
    - nre / nrb: foragers recruited to each elite / remaining best site
    - patch_radius / shrink: initial half-width of a flower patch and the
      factor applied when a local search cycle finds nothing better
    - max_iter / max_error: iteration cap and minimum improvement between
      consecutive iterations
    - workers: threads used to evaluate a batch of candidate points
    """

    model_config = {"frozen": True}

    ns: int = Field(default=30, ge=1, description="Scout count")
    nb: int = Field(default=10, ge=1, description="Best sites")
    ne: int = Field(default=3, ge=1, description="Elite sites")
    nre: int = Field(default=7, ge=1, description="Foragers per elite site")
    nrb: int = Field(default=3, ge=1, description="Foragers per remaining best site")
    patch_radius: float = Field(default=0.1, gt=0.0, lt=1.0, description="Patch half-width")
    shrink: float = Field(default=0.8, gt=0.0, lt=1.0, description="Patch shrink factor")
    local_cycles: int = Field(default=5, ge=1, description="Local search cycles per site")
    max_iter: int = Field(default=50, ge=1, description="Maximum iterations")
    max_error: float = Field(default=1e-6, ge=0.0, description="Minimum improvement")
    seed: int = Field(default=0, ge=0, description="Random seed")
    workers: int = Field(default=1, ge=1, description="Fitness evaluation threads")

    @model_validator(mode="after")
    def _check_sizes(self) -> "AbcConfig":
        if not self.ne <= self.nb <= self.ns:
            raise ValueError("colony sizes must satisfy ne <= nb <= ns")
        if not self.nre > self.nrb:
            raise ValueError("elite sites must recruit more foragers (nre > nrb)")
        return self


class Bee(BaseModel):
    """A candidate parameter point with its fitness (MSE, lower is better)."""

    position: List[float] = Field(description="Coordinates in [1e-4, 1]")
    fitness: float = Field(description="Objective value at position")
    radius: float = Field(default=0.1, gt=0.0, description="Current patch half-width")


class AbcResult(BaseModel):
    """Outcome of one optimizer run."""

    best_position: List[float]
    best_fitness: float
    iterations: int = Field(ge=0)
    evaluations: int = Field(ge=0)
    history: List[float] = Field(
        default_factory=list, description="Best fitness after setup and after each iteration"
    )


# =====================
# Forecast Types
# =====================


class ForecastRecord(BaseModel):
    """One k-step-ahead forecast issued after absorbing the observation at t."""

    t: int = Field(ge=1, description="1-based time of the absorbed observation")
    observed: float = Field(ge=0.0, description="Observation at time t")
    horizon: int = Field(ge=1, description="Lead time k")
    forecast: float = Field(ge=0.0, description="Clamped forecast for time t + k")
    raw_forecast: float = Field(description="Forecast before clamping at zero")
    model_id: Method = Field(description="Method that issued the forecast")


class DetectionSchedule(BaseModel):
    """
    Candidate cycle lengths and the bookkeeping of which were tested.

    `tested` is updated in place by `maybe_detect`.
    """

    expected_cycles: List[int] = Field(default_factory=list)
    tested: Set[int] = Field(default_factory=set)
    threshold: float = Field(default=0.3, ge=-1.0, le=1.0)
    retest: bool = Field(default=False, description="Retest every additional cycle")

    @field_validator("expected_cycles")
    @classmethod
    def _cycles_valid(cls, value: List[int]) -> List[int]:
        return _check_cycles(value)

    @model_validator(mode="after")
    def _tested_subset(self) -> "DetectionSchedule":
        if not self.tested <= set(self.expected_cycles):
            raise ValueError("tested cycles must come from expected_cycles")
        return self


class BaselineKind(BaseModel):
    """Which comparator to run and, for triple smoothing, its season length."""

    kind: Literal["double", "triple"]
    cycle_len: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _triple_needs_cycle(self) -> "BaselineKind":
        if self.kind == "triple" and (self.cycle_len is None or self.cycle_len < 2):
            raise ValueError("triple smoothing requires cycle_len >= 2")
        return self


class EvalPairs(BaseModel):
    """Aligned (forecast, observed) pairs; pair i compares X̂_i(k) with X_{i+k}."""

    pairs: List[Tuple[float, float]] = Field(default_factory=list)


# =====================
# Ingestion Types
# =====================


class DemandSeries(BaseModel):
    """A contiguous per-minute (or per-period) demand series."""

    start_minute: datetime = Field(description="UTC timestamp of the first value")
    values: List[float] = Field(default_factory=list)
    unit: Unit = Field(default="requests")

    @field_validator("values")
    @classmethod
    def _nonnegative(cls, value: List[float]) -> List[float]:
        if any(v < 0 for v in value):
            raise ValueError("demand values must be nonnegative")
        return value

    def timestamps(self) -> List[datetime]:
        return [self.start_minute + timedelta(minutes=i) for i in range(len(self.values))]


class IngestReport(BaseModel):
    """Line counters collected while parsing an access log."""

    lines_total: int = Field(default=0, ge=0)
    lines_parsed: int = Field(default=0, ge=0)
    lines_skipped: int = Field(default=0, ge=0)
    first_ts: Optional[datetime] = Field(default=None)
    last_ts: Optional[datetime] = Field(default=None)

    @model_validator(mode="after")
    def _counts_add_up(self) -> "IngestReport":
        if self.lines_parsed + self.lines_skipped != self.lines_total:
            raise ValueError("lines_parsed + lines_skipped must equal lines_total")
        return self


# =====================
# Pipeline Types
# =====================


class PipelineConfig(BaseModel):
    """
    Settings of one replay run.

    Reference: the CLI resolves unset options from MSHW_* environment
    variables before building this model.
    """

    input_path: Path
    input_format: Literal["clf", "csv"] = Field(default="clf")
    method: Method = Field(default="msholtwinters")
    compare: bool = Field(default=False, description="Replay all three methods")
    horizon: int = Field(default=15, ge=1, description="Forecast lead time k")
    warmup: int = Field(default=60, ge=2, description="Observations tuned on before scoring")
    expected_cycles: List[int] = Field(default_factory=lambda: [1440, 10080])
    triple_cycle: Optional[int] = Field(default=None, ge=2)
    threshold: float = Field(default=0.3, ge=-1.0, le=1.0)
    retest: bool = Field(default=False)
    abc: AbcConfig = Field(default_factory=AbcConfig)
    capacity_per_cpu: float = Field(default=60.0, gt=0.0)
    unit: Unit = Field(default="requests")
    skip_zero_obs: bool = Field(default=False)
    reopt_every: Optional[int] = Field(default=None, ge=1)
    out_dir: Path = Field(default=Path("out"))
    seed: int = Field(default=0, ge=0)
    eps_floor: float = Field(default=DEFAULT_EPS_FLOOR, gt=0.0)
    ingest_workers: int = Field(default=1, ge=1, description="Log parsing threads")

    @field_validator("expected_cycles")
    @classmethod
    def _cycles_valid(cls, value: List[int]) -> List[int]:
        return _check_cycles(value)

    @property
    def methods(self) -> List[str]:
        """Methods replayed by this run, proposed method first."""
        if self.compare:
            return list(METHODS)
        return [self.method]

    @property
    def season_for_triple(self) -> Optional[int]:
        if self.triple_cycle is not None:
            return self.triple_cycle
        return self.expected_cycles[0] if self.expected_cycles else None


class DetectionEvent(BaseModel):
    """A seasonal cycle accepted by the seasonality test."""

    method: Method
    cycle_len: int = Field(ge=2)
    time: int = Field(ge=1)
    coefficient: float


class ReoptimizationEvent(BaseModel):
    """
    A bee colony run and the parameters it produced.

    `trigger` is "detection" after a tested cycle is attached and "season"
    when the triple comparator starts its single season.
    """

    method: Method
    time: int = Field(ge=1)
    trigger: Literal["warmup", "detection", "season", "periodic"]
    params: SmoothingParams
    mse: float


class MethodMetrics(BaseModel):
    """Final accuracy of one method."""

    mape: float
    pred25: float
    rmse: float
    mse: float
    pairs: int = Field(ge=0, description="Number of scored pairs")


class RunReport(BaseModel):
    """Everything a replay run produced."""

    records: List[ForecastRecord] = Field(default_factory=list)
    detected_cycles: List[DetectionEvent] = Field(default_factory=list)
    reoptimizations: List[ReoptimizationEvent] = Field(default_factory=list)
    metrics: Dict[str, MethodMetrics] = Field(default_factory=dict)
    final_params: Dict[str, SmoothingParams] = Field(default_factory=dict)
    ingest: IngestReport = Field(default_factory=IngestReport)
    horizon: int = Field(default=15, ge=1)
    warmup: int = Field(default=60, ge=2)
    eps_floor: float = Field(default=DEFAULT_EPS_FLOOR, gt=0.0)
    skip_zero_obs: bool = Field(default=False)

    def records_for(self, method: str) -> List[ForecastRecord]:
        return [r for r in self.records if r.model_id == method]
