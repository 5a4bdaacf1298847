"""Budgeted Bayesian optimization: Sobol exploration, then GP expected improvement."""

import logging
import math
from pathlib import Path
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize
from typing_extensions import TypeAlias

from ..errors import ValidationError
from ..models.trace import OptimizationTrace, TraceRecord, TraceWriter
from .space import SearchSpace
from .surrogate import GpSurrogate, expected_improvement, gp_fit

logger = logging.getLogger(__name__)

ACQUISITION_SEEDS = 64
REFINED_SEEDS = 8
EXPLORATION_FRACTION = 0.25

Evaluation: TypeAlias = Union[float, Tuple[float, float]]
Objective: TypeAlias = Callable[[np.ndarray, int], Evaluation]


def _stream(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=key)


def acquire(
    surrogate: Optional[GpSurrogate],
    space: SearchSpace,
    seed: int = 0,
    n_seeds: int = ACQUISITION_SEEDS,
    n_refine: int = REFINED_SEEDS,
) -> np.ndarray:
    """
    Next point to evaluate, in the space's natural units.

    EI is evaluated on ``n_seeds`` scrambled Sobol points and the best
    ``n_refine`` of them are refined with L-BFGS-B inside the unit box.
    """
    candidates = space.sobol(n_seeds, _stream(seed, 0))
    if surrogate is None or surrogate.n_observations == 0:
        return space.from_unit(candidates[0])
    best = surrogate.best

    def negative_ei(u: np.ndarray) -> float:
        mean, std = surrogate.predict(u.reshape(1, -1))
        return -float(expected_improvement(mean, std, best)[0])

    mean, std = surrogate.predict(candidates)
    scores = expected_improvement(mean, std, best)
    order = np.argsort(-scores, kind="stable")[:n_refine]
    best_u, best_score = candidates[order[0]], float(scores[order[0]])
    for index in order:
        result = minimize(negative_ei, candidates[index], method="L-BFGS-B", bounds=[(0.0, 1.0)] * space.dim)
        if result.success and -result.fun > best_score:
            best_u, best_score = np.clip(result.x, 0.0, 1.0), float(-result.fun)
    logger.debug("Acquisition EI %.3e at %s", best_score, np.round(best_u, 4))
    return space.from_unit(best_u)


def _unpack(evaluation: Evaluation) -> Tuple[float, float]:
    if isinstance(evaluation, tuple):
        return float(evaluation[0]), float(evaluation[1])
    return float(evaluation), 0.0


def _penalty(values: np.ndarray) -> float:
    if len(values) == 0:
        return 0.0
    return float(np.min(values) - (np.std(values) if len(values) > 1 else 0.0))


def optimize(
    objective: Objective,
    space: SearchSpace,
    budget: int,
    seed: int,
    exploration_fraction: float = EXPLORATION_FRACTION,
    trace_path: Optional[Union[str, Path]] = None,
    noise_free: bool = False,
    tick: Optional[Callable[[int], int]] = None,
    acquisition_seeds: int = ACQUISITION_SEEDS,
    refine: int = REFINED_SEEDS,
) -> OptimizationTrace:
    """
    Maximize a noisy objective over a box.

    Args:
        objective: f(params, iteration) returning a value or (value, stderr)
        space: Search box
        budget: Number of evaluations
        seed: Master seed; design, acquisition and surrogate streams derive from it
        exploration_fraction: Share of the budget spent on the Sobol design
        trace_path: JSON-lines file appended after every evaluation
        noise_free: Fit the surrogate without a noise kernel
        tick: Maps an iteration to a wall-clock tick; defaults to the iteration
        acquisition_seeds: Sobol candidates scored by EI per iteration
        refine: Candidates refined with L-BFGS-B

    Returns:
        OptimizationTrace of every evaluation
    """
    if budget < 1:
        raise ValidationError("Optimization budget must be at least 1")
    if not 0.0 <= exploration_fraction <= 1.0:
        raise ValidationError("Exploration fraction must lie in [0, 1]")
    n_explore = min(budget, max(1, math.ceil(exploration_fraction * budget)))
    design = space.sobol(n_explore, _stream(seed, 0))
    tick = tick or (lambda iteration: iteration)

    trace = OptimizationTrace()
    xs, ys, errs = [], [], []
    incumbent = -math.inf
    with TraceWriter(trace_path) as writer:
        for iteration in range(budget):
            if iteration < n_explore:
                phase, x = "explore", space.from_unit(design[iteration])
            else:
                surrogate = gp_fit(
                    np.array([space.to_unit(p) for p in xs]),
                    ys,
                    None if noise_free else errs,
                    noise_free=noise_free,
                    seed=int(_stream(seed, 2, iteration).generate_state(1)[0]),
                )
                phase, x = "bo", acquire(
                    surrogate,
                    space,
                    seed=int(_stream(seed, 1, iteration).generate_state(1)[0]),
                    n_seeds=acquisition_seeds,
                    n_refine=refine,
                )
            failed = False
            try:
                value, stderr = _unpack(objective(x, iteration))
                if not math.isfinite(value):
                    raise ValueError(f"non-finite objective value {value}")
            except Exception as e:
                logger.warning("Evaluation %d failed, recording penalty: %s", iteration, e)
                value, stderr, failed = _penalty(np.array(ys)), 0.0, True
            incumbent = max(incumbent, value)
            xs.append(x)
            ys.append(value)
            errs.append(stderr)
            record = TraceRecord(
                iteration=iteration,
                params=space.as_dict(x),
                value=value,
                stderr=stderr,
                tick=tick(iteration),
                incumbent=incumbent,
                phase=phase,
                failed=failed,
            )
            trace.append(record)
            writer.write(record)
            logger.debug("Iteration %d (%s): value %.4f incumbent %.4f", iteration, phase, value, record.incumbent)
    logger.info("Optimization finished: %d evaluations, incumbent %.4f", budget, trace.incumbent)
    return trace
