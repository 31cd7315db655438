#!/usr/bin/env python3
"""
Tests for the bee colony optimizer.

Includes grid-search oracle comparisons on a synthetic objective and on the
replay MSE of a real series.
"""

import numpy as np
import pytest

from mshw_forecast import (
    AbcConfig,
    Bee,
    BeeColony,
    SmoothingParams,
    init_online,
    local_search,
    optimize,
    replay_mse,
    snapshot_mse,
    tune_from_state,
    tune_smoothing,
)

GRID = np.round(np.arange(0.01, 1.0001, 0.01), 2).tolist()


def sphere(position):
    return float(sum((p - 0.5) ** 2 for p in position))


class CountingFitness:
    """Wraps a fitness function and counts calls."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, position):
        self.calls += 1
        return self.fn(position)


class TestConfig:
    """Tests for colony settings validation."""

    def test_defaults(self):
        config = AbcConfig()
        assert (config.ns, config.nb, config.ne) == (30, 10, 3)
        assert config.nre > config.nrb

    def test_rejects_more_elites_than_sites(self):
        with pytest.raises(ValueError):
            AbcConfig(nb=2, ne=3)

    def test_rejects_more_sites_than_scouts(self):
        with pytest.raises(ValueError):
            AbcConfig(ns=5, nb=6, ne=2)

    def test_rejects_elite_recruits_not_above_others(self):
        with pytest.raises(ValueError):
            AbcConfig(nre=3, nrb=3)


class TestLocalSearch:
    """Tests for the flower patch search."""

    def test_constant_fitness_shrinks_patch(self):
        rng = np.random.default_rng(0)
        center = Bee(position=[0.3, 0.6], fitness=1.0, radius=0.1)
        result = local_search(center, 0.1, 4, 5, lambda p: 1.0, rng, shrink=0.8)
        assert result.position == [0.3, 0.6]
        assert result.fitness == 1.0
        assert result.radius == pytest.approx(0.1 * 0.8**5)

    def test_improves_from_corner(self):
        rng = np.random.default_rng(1)
        start = [0.9, 0.9]
        center = Bee(position=start, fitness=sphere(start), radius=0.1)
        result = local_search(center, 0.1, 10, 5, sphere, rng)
        assert result.fitness < sphere(start)
        assert all(1e-4 <= p <= 1.0 for p in result.position)

    def test_single_recruit_single_cycle(self):
        rng = np.random.default_rng(2)
        fitness = CountingFitness(sphere)
        center = Bee(position=[0.5, 0.5], fitness=0.0, radius=0.1)
        local_search(center, 0.1, 1, 1, fitness, rng)
        assert fitness.calls == 1

    def test_rejects_non_positive_radius(self):
        center = Bee(position=[0.5], fitness=0.0, radius=0.1)
        with pytest.raises(ValueError):
            local_search(center, 0.0, 1, 1, sphere, np.random.default_rng(0))


class TestOptimize:
    """Tests for the full colony search."""

    def test_sphere_near_center(self):
        result = optimize(sphere, 2, AbcConfig(seed=3))
        assert np.allclose(result.best_position, [0.5, 0.5], atol=0.05)

    def test_boundary_optimum(self):
        result = optimize(lambda p: (1.0 - p[0]) ** 2, 1, AbcConfig(seed=4))
        assert result.best_position[0] == pytest.approx(1.0, abs=0.05)

    def test_positions_in_bounds(self):
        result = optimize(lambda p: sum(p), 3, AbcConfig(seed=5, max_iter=5))
        assert all(1e-4 <= p <= 1.0 for p in result.best_position)

    def test_deterministic(self):
        config = AbcConfig(seed=9, max_iter=10)
        first = optimize(sphere, 2, config)
        second = optimize(sphere, 2, config)
        assert first == second

    def test_workers_do_not_change_result(self):
        serial = optimize(sphere, 3, AbcConfig(seed=9, max_iter=8))
        threaded = optimize(sphere, 3, AbcConfig(seed=9, max_iter=8, workers=4))
        assert serial == threaded

    def test_history_is_non_increasing(self):
        result = optimize(sphere, 2, AbcConfig(seed=6, max_error=0.0))
        assert all(b <= a for a, b in zip(result.history, result.history[1:]))
        assert result.best_fitness == min(result.history)

    def test_evaluation_count(self):
        config = AbcConfig(seed=7, max_iter=6)
        fitness = CountingFitness(sphere)
        result = BeeColony(config).optimize(fitness, 2)
        per_iteration = (
            config.ne * config.nre * config.local_cycles
            + (config.nb - config.ne) * config.nrb * config.local_cycles
            + (config.ns - config.nb)
        )
        assert result.evaluations == config.ns + result.iterations * per_iteration
        assert fitness.calls == result.evaluations
        assert 1 <= result.iterations <= config.max_iter

    def test_nan_fitness_is_never_best(self):
        def fitness(position):
            return float("nan") if position[0] > 0.5 else sphere(position)

        result = optimize(fitness, 2, AbcConfig(seed=8, max_iter=5))
        assert result.best_position[0] <= 0.5
        assert np.isfinite(result.best_fitness)

    def test_rejects_zero_dim(self):
        with pytest.raises(ValueError):
            optimize(sphere, 0)


class TestGridOracle:
    """The colony must match an exhaustive 0.01 grid to within 1e-3."""

    def test_sphere(self):
        grid_best = min(sphere([a, b]) for a in GRID for b in GRID)
        result = optimize(sphere, 2, AbcConfig(seed=12, max_error=0.0))
        assert result.best_fitness <= grid_best + 1e-3

    def test_replay_mse(self):
        rng = np.random.default_rng(300)
        t = np.arange(300)
        x = (2.0 + 0.002 * t + 0.2 * rng.standard_normal(300)).tolist()
        horizon = 3

        def fitness(position):
            return replay_mse(x, [], SmoothingParams.from_vector(list(position)), horizon)

        grid_best = min(fitness([a, b]) for a in GRID for b in GRID)
        result = optimize(fitness, 2, AbcConfig(seed=13, max_error=0.0))
        assert result.best_fitness <= grid_best + 1e-3


class TestTuneSmoothing:
    """Tests for tuning model constants on a history."""

    def test_dimension_follows_patterns(self, fast_abc):
        x = ([10.0, 20.0, 30.0, 40.0] * 10)
        seeds = [(4, [0.4, 0.8, 1.2, 1.6])]
        params, result = tune_smoothing(x, seeds, 1, fast_abc)
        assert len(params.gammas) == 1
        assert len(result.best_position) == 3

    def test_best_fitness_matches_replay(self, fast_abc):
        x = [float(v) for v in 50 + np.sin(np.arange(80) / 3.0)]
        params, result = tune_smoothing(x, [], 2, fast_abc)
        assert replay_mse(x, [], params, 2) == pytest.approx(result.best_fitness)


class TestTuneFromState:
    """Tests for re-tuning from a saved state."""

    def test_dimension_counts_new_cycles(self, fast_abc):
        x = [10.0, 20.0, 30.0, 40.0] * 12
        anchor = init_online(x[0], x[1])
        params, result = tune_from_state(anchor, x, 1, fast_abc, new_cycles=[4])
        assert len(params.gammas) == 1
        assert len(result.best_position) == 3
        assert anchor.n == 0

    def test_best_fitness_matches_snapshot(self, fast_abc):
        x = [float(v) for v in 50 + np.sin(np.arange(80) / 3.0)]
        anchor = init_online(x[0], x[1])
        for value in x[1:30]:
            anchor.step(value)
        params, result = tune_from_state(anchor, x, 2, fast_abc)
        assert snapshot_mse(anchor, x, params, 2) == pytest.approx(result.best_fitness)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
