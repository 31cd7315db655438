#!/usr/bin/env python3
"""Tests for the double and triple smoothing comparators."""

import numpy as np
import pytest

from mshw_forecast import (
    BaselineKind,
    InsufficientHistoryError,
    ModelState,
    SmoothingParams,
    fit_baseline,
    init_batch,
    init_seasonal_indices,
    mape,
    phase_ring,
    run_double,
    run_triple,
)
from mshw_forecast.baselines import triple_state


class TestDouble:
    """Tests for double exponential smoothing."""

    def test_tracks_a_line_exactly(self):
        x = [float(i) for i in range(1, 30)]
        records = run_double(x, SmoothingParams(alpha=1.0, beta=1.0), 1)
        assert [r.t for r in records] == list(range(1, 30))
        # From t = 2 on, the forecast issued at t is x_{t+1}
        for record in records[1:-1]:
            assert record.forecast == x[record.t]

    def test_constant(self):
        records = run_double([9.0] * 20, [0.3, 0.4], 5)
        assert all(r.forecast == pytest.approx(9.0) for r in records)
        assert all(r.model_id == "double" for r in records)

    def test_rejects_gammas(self):
        with pytest.raises(ValueError):
            run_double([1.0, 2.0, 3.0], SmoothingParams(alpha=0.5, beta=0.5, gammas=[0.5]), 1)

    def test_needs_two_points(self):
        with pytest.raises(InsufficientHistoryError):
            run_double([1.0], [0.5, 0.5], 1)


class TestTriple:
    """Tests for single-season multiplicative smoothing."""

    def test_initial_indices(self):
        state = triple_state([10.0, 20.0] * 5, 2, [0.5, 0.5, 0.5])
        assert state.t == 4
        assert sorted(state.patterns[0].indices) == pytest.approx([2 / 3, 4 / 3], abs=1e-12)

    def test_periodic_series_last_cycle(self):
        pattern = [10.0, 20.0, 30.0, 40.0]
        x = pattern * 30
        records = run_triple(x, 4, [0.1, 0.1, 0.3], 1)
        last_cycle = records[-5:-1]
        pairs = [(r.forecast, x[r.t]) for r in last_cycle]
        assert mape(pairs) < 0.01

    def test_starts_at_two_cycles(self):
        records = run_triple([5.0] * 30, 4, [0.2, 0.2, 0.2], 2)
        assert records[0].t == 8
        assert records[-1].t == 30
        assert all(r.forecast == pytest.approx(5.0) for r in records)

    def test_too_short(self):
        with pytest.raises(InsufficientHistoryError):
            run_triple([1.0] * 11, 4, [0.5, 0.5, 0.5], 1)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_matches_one_pattern_model(self, seed):
        rng = np.random.default_rng(seed)
        cycle_len = 6
        shape = rng.uniform(0.5, 1.5, size=cycle_len)
        x = (np.tile(shape, 10) * rng.uniform(80.0, 120.0, size=60)).tolist()
        alpha, beta, gamma = rng.uniform(0.05, 0.95, size=3).tolist()
        records = run_triple(x, cycle_len, [alpha, beta, gamma], 3)

        level, trend = init_batch(x, cycle_len)
        state = ModelState(
            level, trend, params=SmoothingParams(alpha=alpha, beta=beta), t=2 * cycle_len
        )
        state.add_pattern(cycle_len, phase_ring(init_seasonal_indices(x, cycle_len)), gamma)
        expected = [state.raw_forecast(3)]
        for value in x[state.t :]:
            state.step(value)
            expected.append(state.raw_forecast(3))

        assert len(records) == len(expected)
        for record, value in zip(records, expected):
            assert abs(record.raw_forecast - value) <= 1e-12 * max(1.0, abs(value))


class TestDispatch:
    """Tests for comparator selection and tuning."""

    def test_triple_kind_requires_cycle(self):
        with pytest.raises(ValueError):
            BaselineKind(kind="triple")

    def test_fit_triple(self, fast_abc):
        x = [10.0, 20.0, 30.0, 40.0] * 12
        params, error = fit_baseline(BaselineKind(kind="triple", cycle_len=4), x, 1, fast_abc)
        assert len(params.gammas) == 1
        assert error >= 0.0

    def test_fit_triple_needs_three_cycles(self, fast_abc):
        with pytest.raises(InsufficientHistoryError):
            fit_baseline(BaselineKind(kind="triple", cycle_len=4), [5.0] * 11, 1, fast_abc)

    def test_fit_double(self, fast_abc):
        x = [float(i) for i in range(1, 40)]
        params, error = fit_baseline(BaselineKind(kind="double"), x, 1, fast_abc)
        assert params.gammas == []
        assert error >= 0.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
