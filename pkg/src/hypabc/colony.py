"""HyP-ABC: artificial bee colony search over mixed-type hyper-parameter spaces.

One cycle runs the employed phase (one neighbour move per food source),
the onlooker phase (fitness-proportional re-exploitation), then at most
one scout replacement of the most exhausted source. Objectives are
minimised; a candidate replaces its food source only when strictly better.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .evaluation import (
    BudgetExhausted,
    EvalRecord,
    Evaluator,
    RunResult,
    StopSearch,
    TargetReached,
)
from .objective import EvalCache, ObjectiveHandle
from .space import Configuration, SearchSpace, decode, neighbor, sample_uniform

DEFAULT_NP = 50
#: Extra neighbour draws allowed when a candidate equals its food source.
R_RETRY = 10
#: Consecutive cycles without a new (uncached) evaluation before giving up.
MAX_STALL_CYCLES = 100


def fitness_of(objective: float) -> float:
    """Map a minimised objective to a positive fitness.

    >>> fitness_of(0.0), fitness_of(-1.0)
    (1.0, 2.0)
    """
    if not math.isfinite(objective):
        raise ValueError(f"objective must be finite, got {objective!r}")
    if objective >= 0:
        return 1.0 / (1.0 + objective)
    return 1.0 + abs(objective)


def selection_probabilities(fitness: Sequence[float]) -> np.ndarray:
    """Roulette-wheel probabilities ``fit_i / sum(fit)``."""
    fit = np.asarray(fitness, dtype=float)
    if fit.size == 0:
        raise ValueError("empty population")
    if np.any(fit < 0) or not np.all(np.isfinite(fit)):
        raise ValueError("fitness values must be finite and non-negative")
    total = fit.sum()
    if total <= 0:
        raise ValueError("total fitness is zero")
    if np.all(fit == fit[0]):
        return np.full(fit.size, 1.0 / fit.size)
    return fit / total


@dataclass
class FoodSource:
    config: Configuration
    objective: float
    trial: int = 0

    @property
    def fitness(self) -> float:
        return fitness_of(self.objective)


@dataclass
class ColonyParams:
    population_number: int = DEFAULT_NP
    max_evaluations: int = 1000
    trial_limit: int | None = None  # None -> population_number * D
    target_objective: float | None = None
    seed: int = 0
    parallel_width: int = 1
    max_retries: int = R_RETRY
    max_stall_cycles: int = MAX_STALL_CYCLES

    def __post_init__(self):
        if self.population_number < 2:
            raise ValueError("population_number must be at least 2")
        if self.max_evaluations < self.population_number:
            raise ValueError(
                f"max_evaluations ({self.max_evaluations}) must be >= population_number "
                f"({self.population_number})"
            )
        if self.trial_limit is not None and self.trial_limit < 1:
            raise ValueError("trial_limit must be positive")
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be positive")

    def limit_for(self, space: SearchSpace) -> int:
        if self.trial_limit is not None:
            return self.trial_limit
        return self.population_number * len(space)


@dataclass
class ColonyState:
    space: SearchSpace
    params: ColonyParams
    evaluator: Evaluator
    rng: np.random.Generator
    sources: list[FoodSource]
    best: FoodSource
    trial_limit: int
    cycle: int = 0
    evaluations_per_cycle: list[int] = field(default_factory=list)

    @property
    def evaluations_used(self) -> int:
        return self.evaluator.evaluations_used

    def target_reached(self) -> bool:
        target = self.params.target_objective
        return target is not None and self.best.objective <= target

    def _offer_best(self, source: FoodSource) -> None:
        if source.objective < self.best.objective:
            self.best = FoodSource(source.config, source.objective, 0)


def initialize(
    space: SearchSpace,
    params: ColonyParams,
    obj: ObjectiveHandle,
    observer: Callable[[EvalRecord], None] | None = None,
    cache: EvalCache | None = None,
    record_timing: bool = False,
) -> ColonyState:
    """Sample and evaluate ``population_number`` food sources."""
    rng = np.random.default_rng(params.seed)
    evaluator = Evaluator(space, obj, params.max_evaluations, cache, observer, record_timing)
    configs = [sample_uniform(space, rng) for _ in range(params.population_number)]
    if params.parallel_width > 1:
        evaluator.prefetch(configs, params.parallel_width)
    sources = []
    for i, c in enumerate(configs):
        value, _ = evaluator.request(c, "init", 0, source=i)
        sources.append(FoodSource(c, value, 0))
    evaluator.discard_pending()
    best = min(sources, key=lambda s: s.objective)
    return ColonyState(
        space=space,
        params=params,
        evaluator=evaluator,
        rng=rng,
        sources=sources,
        best=FoodSource(best.config, best.objective, 0),
        trial_limit=params.limit_for(space),
    )


def generate_candidate(state: ColonyState, i: int, population: Sequence[Configuration]) -> Configuration | None:
    """Neighbour of source ``i`` that differs from it, or None after all retries.

    Each try re-draws the dimension, the partner ``k != i`` and ``phi``.
    """
    rng, space = state.rng, state.space
    n, d = len(population), len(space)
    current = population[i]
    for _ in range(1 + state.params.max_retries):
        u_dim, u_k, u_phi = rng.random(3)
        dim = min(int(u_dim * d), d - 1)
        k = min(int(u_k * (n - 1)), n - 2)
        if k >= i:
            k += 1
        phi = 2.0 * float(u_phi) - 1.0
        cand = neighbor(space, current, population[k], dim, phi, binary_flip=True)
        if cand != current:
            return cand
    return None


def _apply_candidate(state: ColonyState, i: int, cand: Configuration | None, phase: str) -> bool:
    src = state.sources[i]
    if cand is None:
        src.trial += 1
        return False
    value, _ = state.evaluator.request(cand, phase, state.cycle, source=i)
    if value < src.objective:
        state.sources[i] = FoodSource(cand, value, 0)
        state._offer_best(state.sources[i])
        accepted = True
    else:
        src.trial += 1
        accepted = False
    if state.target_reached():
        raise TargetReached()
    return accepted


def attempt_improvement(state: ColonyState, i: int, phase: str = "employed") -> bool:
    """One greedy neighbour move on source ``i``; returns whether it was replaced.

    A candidate identical to the source is never evaluated: after
    ``max_retries`` identical draws the attempt counts as a rejection.
    """
    cand = generate_candidate(state, i, [s.config for s in state.sources])
    return _apply_candidate(state, i, cand, phase)


def employed_phase(state: ColonyState) -> None:
    # Candidates are drawn from the phase-start population so that the
    # sequence of evaluated configurations does not depend on parallel_width.
    population = [s.config for s in state.sources]
    candidates = [generate_candidate(state, i, population) for i in range(len(population))]
    width = state.params.parallel_width
    try:
        if width > 1:
            state.evaluator.prefetch([c for c in candidates if c is not None], width)
        for i, cand in enumerate(candidates):
            _apply_candidate(state, i, cand, "employed")
    finally:
        state.evaluator.discard_pending()


def onlooker_selection(probs: Sequence[float], rng: np.random.Generator) -> list[int]:
    """Indices whose uniform draw falls below their selection probability."""
    u = rng.random(len(probs))
    return [i for i in range(len(probs)) if u[i] < probs[i]]


def onlooker_phase(state: ColonyState) -> None:
    # Probabilities are fixed at phase start; replacements made during the
    # phase are visible to later neighbour draws.
    probs = selection_probabilities([s.fitness for s in state.sources])
    for i in onlooker_selection(probs, state.rng):
        attempt_improvement(state, i, "onlooker")


def scout_phase(state: ColonyState) -> None:
    """Replace the most exhausted source if its trial count exceeds the limit."""
    trials = [s.trial for s in state.sources]
    i = int(np.argmax(trials))
    if trials[i] <= state.trial_limit:
        return
    config = sample_uniform(state.space, state.rng)
    value, _ = state.evaluator.request(config, "scout", state.cycle, source=i)
    state.sources[i] = FoodSource(config, value, 0)
    state._offer_best(state.sources[i])
    if state.target_reached():
        raise TargetReached()


def _space_exhausted(state: ColonyState) -> bool:
    card = state.space.cardinality()
    return card is not None and len(state.evaluator.cache) >= card


def run(
    space: SearchSpace,
    params: ColonyParams,
    obj: ObjectiveHandle,
    observer: Callable[[EvalRecord], None] | None = None,
    record_timing: bool = False,
) -> RunResult:
    """Run HyP-ABC until the budget is spent or the target objective is met.

    The run also ends when every point of a finite space has been
    evaluated, or after ``max_stall_cycles`` cycles in a row that only hit
    the cache.
    """
    t0 = time.perf_counter()
    state = initialize(space, params, obj, observer=observer, record_timing=record_timing)
    reason = ""
    stall = 0
    try:
        if state.target_reached():
            raise TargetReached()
        while True:
            if state.evaluations_used >= params.max_evaluations:
                raise BudgetExhausted()
            if _space_exhausted(state):
                reason = "exhausted"
                break
            if stall >= params.max_stall_cycles:
                reason = "stalled"
                break
            state.cycle += 1
            before = state.evaluations_used
            try:
                employed_phase(state)
                onlooker_phase(state)
                scout_phase(state)
            finally:
                state.evaluations_per_cycle.append(state.evaluations_used - before)
            stall = stall + 1 if state.evaluations_used == before else 0
    except StopSearch as stop:
        reason = stop.reason
    ev = state.evaluator
    return RunResult(
        method="hypabc",
        best_config=decode(space, state.best.config),
        best_objective=state.best.objective,
        evaluations_used=ev.evaluations_used,
        cycles=state.cycle,
        wall_time=time.perf_counter() - t0,
        records=ev.records,
        seed=params.seed,
        np=params.population_number,
        budget=params.max_evaluations,
        stop_reason=reason,
        cache_hits=ev.cache.hits,
    )
