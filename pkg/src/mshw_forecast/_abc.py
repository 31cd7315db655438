"""
Bee colony search over smoothing constants.

Scouts are scattered uniformly over [1e-4, 1]^dim. Every iteration the best
`nb` sites recruit foragers (more for the `ne` elite ones) that search an
axis-aligned flower patch around the site; a patch whose foragers find
nothing better shrinks. The remaining scouts are replaced by fresh random
points. The search stops after `max_iter` iterations or as soon as an
iteration improves the best fitness by no more than `max_error`.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from mshw_forecast._model import ModelState, PatternSeed, replay_mse, snapshot_mse
from mshw_forecast._types import (
    DEFAULT_EPS_FLOOR,
    PARAM_LOWER_BOUND,
    AbcConfig,
    AbcResult,
    Bee,
    SmoothingParams,
)

logger = logging.getLogger(__name__)

FitnessFn = Callable[[Sequence[float]], float]
BatchEvaluator = Callable[[List[List[float]]], List[float]]


def _score(value: float) -> float:
    value = float(value)
    return value if not math.isnan(value) else math.inf


def _serial_evaluator(fitness: FitnessFn) -> BatchEvaluator:
    def evaluate(positions: List[List[float]]) -> List[float]:
        return [_score(fitness(p)) for p in positions]

    return evaluate


@contextmanager
def _evaluator(fitness: FitnessFn, workers: int) -> Iterator[BatchEvaluator]:
    """Batch evaluator; results always come back in submission order."""
    if workers <= 1:
        yield _serial_evaluator(fitness)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:

        def evaluate(positions: List[List[float]]) -> List[float]:
            return [_score(v) for v in pool.map(fitness, positions)]

        yield evaluate


def _random_positions(rng: np.random.Generator, count: int, dim: int) -> List[List[float]]:
    if count <= 0:
        return []
    return rng.uniform(PARAM_LOWER_BOUND, 1.0, size=(count, dim)).tolist()


def local_search(
    center: Bee,
    radius: float,
    recruits: int,
    cycles: int,
    fitness: FitnessFn,
    rng: np.random.Generator,
    *,
    shrink: float = 0.8,
    evaluate: Optional[BatchEvaluator] = None,
) -> Bee:
    """
    Search the flower patch around one site.

    Each cycle scatters `recruits` foragers uniformly in ``center ± radius``
    (clamped to [1e-4, 1]). The best forager replaces the center when it is
    strictly fitter; otherwise the patch shrinks by `shrink`.

    Returns:
        The final center, carrying its current patch radius.
    """
    if radius <= 0.0:
        raise ValueError("patch radius must be positive")
    if evaluate is None:
        evaluate = _serial_evaluator(fitness)

    position = np.asarray(center.position, dtype=float)
    best_fitness = center.fitness
    for _ in range(cycles):
        offsets = rng.uniform(-radius, radius, size=(recruits, position.size))
        samples = np.clip(position + offsets, PARAM_LOWER_BOUND, 1.0)
        scores = evaluate(samples.tolist())
        winner = int(np.argmin(scores))
        if scores[winner] < best_fitness:
            position = samples[winner]
            best_fitness = scores[winner]
        else:
            radius *= shrink
    return Bee(position=position.tolist(), fitness=best_fitness, radius=radius)


class BeeColony:
    """
    Bee colony optimizer for a pure fitness function on [1e-4, 1]^dim.

    Usage:
        colony = BeeColony(AbcConfig(seed=7))
        result = colony.optimize(lambda p: sum((v - 0.5) ** 2 for v in p), dim=2)
    """

    def __init__(self, config: Optional[AbcConfig] = None):
        self.config = config if config is not None else AbcConfig()

    def optimize(self, fitness: FitnessFn, dim: int) -> AbcResult:
        """
        Minimise `fitness`.

        Deterministic for a given config seed, whatever the worker count.
        """
        if dim < 1:
            raise ValueError("dim must be >= 1")
        config = self.config
        rng = np.random.default_rng(config.seed)

        with _evaluator(fitness, config.workers) as evaluate:
            positions = _random_positions(rng, config.ns, dim)
            scores = evaluate(positions)
            evaluations = len(positions)
            scouts = sorted(
                (Bee(position=p, fitness=s, radius=config.patch_radius)
                 for p, s in zip(positions, scores)),
                key=lambda bee: bee.fitness,
            )
            best = scouts[0]
            history = [best.fitness]

            iteration = 0
            while iteration < config.max_iter:
                iteration += 1
                sites: List[Bee] = []
                for rank, site in enumerate(scouts[: config.nb]):
                    recruits = config.nre if rank < config.ne else config.nrb
                    sites.append(
                        local_search(
                            site,
                            site.radius,
                            recruits,
                            config.local_cycles,
                            fitness,
                            rng,
                            shrink=config.shrink,
                            evaluate=evaluate,
                        )
                    )
                    evaluations += recruits * config.local_cycles

                fresh = _random_positions(rng, config.ns - config.nb, dim)
                fresh_scores = evaluate(fresh)
                evaluations += len(fresh)
                sites.extend(
                    Bee(position=p, fitness=s, radius=config.patch_radius)
                    for p, s in zip(fresh, fresh_scores)
                )
                scouts = sorted(sites, key=lambda bee: bee.fitness)

                current = scouts[0].fitness
                if current < best.fitness:
                    best = scouts[0]
                improvement = history[-1] - current
                history.append(current)
                logger.debug("bee colony iteration %d: best=%.6g", iteration, current)

                # No previous iteration to compare against on the first pass
                if iteration > 1 and improvement <= config.max_error:
                    break

        return AbcResult(
            best_position=list(best.position),
            best_fitness=best.fitness,
            iterations=iteration,
            evaluations=evaluations,
            history=history,
        )


def optimize(fitness: FitnessFn, dim: int, config: Optional[AbcConfig] = None) -> AbcResult:
    """Run the bee colony search once; see `BeeColony.optimize`."""
    return BeeColony(config).optimize(fitness, dim)


# =====================
# Model tuning
# =====================


def tune_smoothing(
    x: Sequence[float],
    seeds: Sequence[PatternSeed],
    horizon: int,
    config: Optional[AbcConfig] = None,
    *,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> Tuple[SmoothingParams, AbcResult]:
    """
    Choose (alpha, beta, gamma_1..gamma_n) minimising the replay MSE on `x`.

    Args:
        x: History to replay.
        seeds: Active patterns with their position-ordered initial indices.
        horizon: Lead time k of the scored forecasts.
        config: Colony settings.

    Returns:
        The best parameters and the raw optimizer result.
    """
    history = [float(v) for v in x]
    patterns = list(seeds)

    def fitness(position: Sequence[float]) -> float:
        params = SmoothingParams.from_vector(list(position))
        return replay_mse(history, patterns, params, horizon, eps_floor=eps_floor)

    result = optimize(fitness, 2 + len(patterns), config)
    params = SmoothingParams.from_vector(result.best_position)
    logger.info(
        "tuned %d constants on %d observations: mse=%.6g after %d iterations",
        params.dim,
        len(history),
        result.best_fitness,
        result.iterations,
    )
    return params, result


def tune_from_state(
    anchor: ModelState,
    x: Sequence[float],
    horizon: int,
    config: Optional[AbcConfig] = None,
    *,
    new_cycles: Sequence[int] = (),
) -> Tuple[SmoothingParams, AbcResult]:
    """
    Choose all constants by replaying the window since `anchor` was saved.

    Unlike `tune_smoothing`, rings are never scored against the history their
    initial indices were estimated from; see `snapshot_mse`.
    """
    history = [float(v) for v in x]
    cycles = list(new_cycles)

    def fitness(position: Sequence[float]) -> float:
        params = SmoothingParams.from_vector(list(position))
        return snapshot_mse(anchor, history, params, horizon, new_cycles=cycles)

    result = optimize(fitness, 2 + anchor.n + len(cycles), config)
    params = SmoothingParams.from_vector(result.best_position)
    logger.info(
        "tuned %d constants on observations %d..%d: mse=%.6g after %d iterations",
        params.dim,
        anchor.t + 1,
        len(history),
        result.best_fitness,
        result.iterations,
    )
    return params, result
