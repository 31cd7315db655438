"""
Multi-seasonal Holt-Winters model.

The state holds a level, a trend and one multiplicative index ring per
detected seasonal pattern. With no patterns the recurrences reduce exactly
to double exponential smoothing.

Time indexing:
    `ModelState.t` is the 1-based time of the most recently absorbed
    observation. Ring slot ``t mod L`` of a pattern holds the index for
    period ``t``. `seasonal_product(state, k)` therefore reads the indices of
    period ``t + k``, and `step` advances to ``t + 1`` before reading ``M(0)``.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from mshw_forecast._exceptions import (
    DegenerateWindowError,
    DuplicateCycleError,
    InsufficientHistoryError,
)
from mshw_forecast._types import DEFAULT_EPS_FLOOR, SmoothingParams

logger = logging.getLogger(__name__)

# Used until the optimizer has produced real constants
DEFAULT_PARAMS = SmoothingParams(alpha=0.5, beta=0.1)

# (cycle_len, indices by 0-based series position)
PatternSeed = Tuple[int, Sequence[float]]


class SeasonalPattern:
    """One seasonal cycle: its length, index ring and gamma slot."""

    __slots__ = ("cycle_len", "indices", "gamma_slot")

    def __init__(self, cycle_len: int, indices: List[float], gamma_slot: int):
        self.cycle_len = cycle_len
        self.indices = indices
        self.gamma_slot = gamma_slot

    def index_for(self, time: int) -> float:
        """Seasonal index that applies to period `time`."""
        return self.indices[time % self.cycle_len]

    def __repr__(self) -> str:
        return f"SeasonalPattern(cycle_len={self.cycle_len}, gamma_slot={self.gamma_slot})"


class ModelState:
    """
    Live Holt-Winters state.

    A state has a single writer: `step` and `add_pattern` mutate it in place
    and return it. Use `copy()` to hand an independent snapshot to another
    thread.
    """

    __slots__ = ("level", "trend", "patterns", "t", "params", "eps_floor")

    def __init__(
        self,
        level: float,
        trend: float,
        *,
        params: Optional[SmoothingParams] = None,
        patterns: Optional[List[SeasonalPattern]] = None,
        t: int = 1,
        eps_floor: float = DEFAULT_EPS_FLOOR,
    ):
        self.eps_floor = eps_floor
        self.level = max(level, eps_floor)
        self.trend = trend
        self.patterns: List[SeasonalPattern] = patterns if patterns is not None else []
        self.t = t
        self.params = params if params is not None else DEFAULT_PARAMS
        if len(self.params.gammas) != len(self.patterns):
            raise ValueError("params.gammas must have one entry per seasonal pattern")

    @property
    def n(self) -> int:
        """Number of active seasonal patterns."""
        return len(self.patterns)

    @property
    def cycle_lengths(self) -> List[int]:
        return [p.cycle_len for p in self.patterns]

    def set_params(self, params: SmoothingParams) -> None:
        if len(params.gammas) != self.n:
            raise ValueError(
                f"expected {self.n} seasonal constants, got {len(params.gammas)}"
            )
        self.params = params

    def copy(self) -> "ModelState":
        return ModelState(
            self.level,
            self.trend,
            params=self.params,
            patterns=[
                SeasonalPattern(p.cycle_len, list(p.indices), p.gamma_slot)
                for p in self.patterns
            ],
            t=self.t,
            eps_floor=self.eps_floor,
        )

    def _product_at(self, time: int) -> float:
        product = 1.0
        for pattern in self.patterns:
            product *= pattern.indices[time % pattern.cycle_len]
        return product

    def seasonal_product(self, k: int = 0) -> float:
        """Combined multiplier M(k): product of every ring at period t + k."""
        return self._product_at(self.t + k)

    def step(self, x_t: float) -> "ModelState":
        """
        Absorb the next observation.

        Updates level, then trend, then every seasonal ring, in that order;
        the seasonal update uses the freshly computed level.
        """
        eps = self.eps_floor
        if x_t < eps:
            x_t = eps
        params = self.params
        alpha = params.alpha
        beta = params.beta
        time = self.t + 1

        m0 = self._product_at(time)
        prev_level = self.level
        level = alpha * x_t / m0 + (1.0 - alpha) * (prev_level + self.trend)
        if level < eps:
            level = eps
        self.trend = beta * (level - prev_level) + (1.0 - beta) * self.trend
        self.level = level

        if self.patterns:
            gammas = params.gammas
            denominator = level * m0
            for pattern in self.patterns:
                slot = time % pattern.cycle_len
                old = pattern.indices[slot]
                gamma = gammas[pattern.gamma_slot]
                updated = gamma * x_t * old / denominator + (1.0 - gamma) * old
                pattern.indices[slot] = updated if updated >= eps else eps

        self.t = time
        return self

    def raw_forecast(self, k: int) -> float:
        """Unclamped k-step-ahead forecast (S_t + k·B_t)·M(k)."""
        if k < 1:
            raise ValueError("forecast horizon must be >= 1")
        return (self.level + k * self.trend) * self._product_at(self.t + k)

    def forecast(self, k: int) -> float:
        """k-step-ahead forecast clamped at zero."""
        value = self.raw_forecast(k)
        return value if value > 0.0 else 0.0

    def add_pattern(
        self, cycle_len: int, indices: Sequence[float], gamma: float
    ) -> "ModelState":
        """
        Attach a new seasonal pattern.

        `indices` are ring slots (slot ``s`` applies to periods with
        ``t mod cycle_len == s``); see `phase_ring`. Level and trend are kept.
        """
        if cycle_len < 1:
            raise ValueError("cycle_len must be positive")
        if cycle_len in self.cycle_lengths:
            raise DuplicateCycleError(
                f"Seasonal cycle {cycle_len} is already active",
                code="DUPLICATE_CYCLE",
                details=f"active={self.cycle_lengths}",
            )
        if len(indices) != cycle_len:
            raise ValueError(
                f"expected {cycle_len} seasonal indices, got {len(indices)}"
            )
        ring = [max(float(v), self.eps_floor) for v in indices]
        params = SmoothingParams(
            alpha=self.params.alpha,
            beta=self.params.beta,
            gammas=[*self.params.gammas, gamma],
        )
        self.patterns.append(SeasonalPattern(cycle_len, ring, gamma_slot=self.n))
        self.params = params
        return self

    def __repr__(self) -> str:
        return (
            f"ModelState(t={self.t}, level={self.level:.6g}, trend={self.trend:.6g}, "
            f"cycles={self.cycle_lengths})"
        )


# =====================
# Initialization
# =====================


def init_online(
    x1: float,
    x2: float,
    *,
    params: Optional[SmoothingParams] = None,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> ModelState:
    """
    Start a state from the first two observations.

    Level is x1 (floored), trend is x2 - x1, no seasonal patterns, t = 1.
    """
    return ModelState(x1, x2 - x1, params=params, t=1, eps_floor=eps_floor)


def init_batch(x: Sequence[float], cycle_len: int) -> Tuple[float, float]:
    """
    Level and trend from the first two seasonal cycles.

    Args:
        x: Observations.
        cycle_len: Length L of the first seasonal pattern.

    Returns:
        (level, trend): the mean of the first 2L observations and 1/L of the
        mean difference between the second and the first cycle.
    """
    if cycle_len < 1:
        raise ValueError("cycle_len must be positive")
    values = np.asarray(x, dtype=float)
    if values.size < 2 * cycle_len:
        raise InsufficientHistoryError(
            f"Need {2 * cycle_len} observations to initialise level and trend",
            code="INSUFFICIENT_HISTORY",
            details=f"got {values.size}",
        )
    first = values[:cycle_len]
    second = values[cycle_len : 2 * cycle_len]
    level = float(np.mean(values[: 2 * cycle_len]))
    trend = float(np.mean(second - first)) / cycle_len
    return level, trend


def init_seasonal_indices(
    x: Sequence[float],
    cycle_len: int,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> List[float]:
    """
    Initial seasonal indices from ratios to a centered moving average.

    Each index is the mean of the two ratios X_j / A_j taken at the same
    phase of the first two full cycles, starting at j = floor(L/2). The
    result is ordered by 0-based series position (``result[p]`` applies to
    positions p, p + L, ...), renormalised to mean 1 and floored.

    Raises:
        InsufficientHistoryError: fewer than 3L observations.
        DegenerateWindowError: a moving-average window is not positive.
    """
    if cycle_len < 2:
        raise ValueError("cycle_len must be >= 2")
    values = np.asarray(x, dtype=float)
    if values.size < 3 * cycle_len:
        raise InsufficientHistoryError(
            f"Need {3 * cycle_len} observations to initialise a cycle of {cycle_len}",
            code="INSUFFICIENT_HISTORY",
            details=f"got {values.size}",
        )

    half = cycle_len // 2
    # Even L: window j-half .. j-1+half. Odd L: j-half .. j+half. Both hold L terms.
    tail = half - 1 if cycle_len % 2 == 0 else half
    csum = np.concatenate(([0.0], np.cumsum(values)))

    positions = np.arange(half, half + cycle_len)
    both = np.concatenate((positions, positions + cycle_len))
    averages = (csum[both + tail + 1] - csum[both - half]) / cycle_len
    if np.any(averages <= 0.0):
        raise DegenerateWindowError(
            f"Centered moving average is not positive for cycle {cycle_len}",
            code="DEGENERATE_WINDOW",
            details="the initialisation window contains only zeros",
        )

    ratios = values[both] / averages
    per_position = (ratios[:cycle_len] + ratios[cycle_len:]) / 2.0

    indices = np.empty(cycle_len, dtype=float)
    indices[positions % cycle_len] = per_position
    indices /= indices.mean()
    return [max(float(v), eps_floor) for v in indices]


def phase_ring(indices: Sequence[float]) -> List[float]:
    """
    Rotate position-ordered indices into ring slots.

    Position p of a series started at t = 1 is period p + 1, so it lands in
    slot (p + 1) mod L.
    """
    cycle_len = len(indices)
    ring = [0.0] * cycle_len
    for position, value in enumerate(indices):
        ring[(position + 1) % cycle_len] = float(value)
    return ring


def deseasonalize(x: Sequence[float], seeds: Sequence[PatternSeed]) -> np.ndarray:
    """Divide a series by the position-ordered indices of every given pattern."""
    values = np.asarray(x, dtype=float)
    if not seeds:
        return values.copy()
    positions = np.arange(values.size)
    factor = np.ones(values.size, dtype=float)
    for cycle_len, indices in seeds:
        factor *= np.asarray(indices, dtype=float)[positions % cycle_len]
    return values / factor


# =====================
# Functional interface
# =====================


def seasonal_product(state: ModelState, k: int = 0) -> float:
    return state.seasonal_product(k)


def step(state: ModelState, x_t: float) -> ModelState:
    return state.step(x_t)


def forecast(state: ModelState, k: int) -> float:
    return state.forecast(k)


def add_pattern(
    state: ModelState, cycle_len: int, indices: Sequence[float], gamma: float
) -> ModelState:
    return state.add_pattern(cycle_len, indices, gamma)


def build_state(
    x: Sequence[float],
    seeds: Sequence[PatternSeed],
    params: SmoothingParams,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> ModelState:
    """Online-initialised state with every seed pattern attached from t = 1."""
    if len(params.gammas) != len(seeds):
        raise ValueError("params.gammas must have one entry per seasonal pattern")
    state = init_online(
        x[0], x[1], params=SmoothingParams(alpha=params.alpha, beta=params.beta),
        eps_floor=eps_floor,
    )
    for (cycle_len, indices), gamma in zip(seeds, params.gammas):
        state.add_pattern(cycle_len, phase_ring(indices), gamma)
    return state


def replay_mse(
    x: Sequence[float],
    expected_patterns: Sequence[PatternSeed],
    params: SmoothingParams,
    horizon: int,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> float:
    """
    Mean squared k-step error of a fixed-parameter replay over `x`.

    The model is started online from x1, x2 with every pattern attached;
    errors are accumulated for forecasts issued from t = l_n (the largest
    cycle length), or t = 2 without patterns, up to the last forecast whose
    outcome is observed. This is the bee colony fitness.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    x = [float(v) for v in x]
    size = len(x)
    start = max(cycle_len for cycle_len, _ in expected_patterns) if expected_patterns else 2
    last = size - horizon
    if size < 2 or last < start:
        raise InsufficientHistoryError(
            "No forecast with an observed outcome to evaluate",
            code="INSUFFICIENT_HISTORY",
            details=f"length={size}, horizon={horizon}, start={start}",
        )

    state = build_state(x, expected_patterns, params, eps_floor=eps_floor)
    total = 0.0
    count = 0
    for j in range(1, last):
        state.step(x[j])
        if j + 1 >= start:
            error = state.forecast(horizon) - x[j + horizon]
            total += error * error
            count += 1
    return total / count


def snapshot_mse(
    anchor: ModelState,
    x: Sequence[float],
    params: SmoothingParams,
    horizon: int,
    *,
    new_cycles: Sequence[int] = (),
) -> float:
    """
    Mean squared k-step error of replaying `x` forward from a saved state.

    The replay starts from a copy of `anchor` and absorbs ``x[anchor.t:]``;
    `anchor` itself is not modified. Rings the anchor already carries keep
    their live indices. Every cycle in `new_cycles` is attached to the copy as
    a flat unit ring, so its constant is scored on how well the ring learns
    from observations it has not been fitted to.

    Args:
        anchor: State as it was at the start of the window.
        x: Every observation seen so far, oldest first.
        params: (alpha, beta, gammas of the anchor's rings, gammas of new_cycles).
        horizon: Lead time k of the scored forecasts.
        new_cycles: Cycle lengths attached since the anchor was saved.

    Raises:
        InsufficientHistoryError: no forecast in the window has an observed outcome.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if len(params.gammas) != anchor.n + len(new_cycles):
        raise ValueError("params.gammas must cover the anchor's rings and every new cycle")
    x = [float(v) for v in x]
    last = len(x) - horizon
    if last <= anchor.t:
        raise InsufficientHistoryError(
            "No forecast with an observed outcome after the saved state",
            code="INSUFFICIENT_HISTORY",
            details=f"length={len(x)}, horizon={horizon}, anchor_t={anchor.t}",
        )

    state = anchor.copy()
    state.set_params(
        SmoothingParams(
            alpha=params.alpha, beta=params.beta, gammas=list(params.gammas[: anchor.n])
        )
    )
    for cycle_len, gamma in zip(new_cycles, params.gammas[anchor.n :]):
        state.add_pattern(cycle_len, [1.0] * cycle_len, gamma)

    total = 0.0
    for j in range(anchor.t, last):
        state.step(x[j])
        error = state.forecast(horizon) - x[j + horizon]
        total += error * error
    return total / (last - anchor.t)
