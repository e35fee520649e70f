"""Random search and grid search under the same logging contract as the colony."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .evaluation import EvalRecord, Evaluator, RunResult
from .objective import ObjectiveHandle
from .space import SearchSpace, SpaceError, decode, repair, sample_uniform

DEFAULT_GRID_CAP = 10**6


class GridTooLarge(ValueError):
    pass


@dataclass
class GridSpec:
    """Per-dimension grid steps, keyed by parameter name.

    Integer dimensions default to step 1. Continuous dimensions must be
    given a step. Categorical dimensions always use every choice.
    """

    steps: Mapping[str, float] = field(default_factory=dict)
    default_step: float | None = None

    def __post_init__(self):
        for name, step in self.steps.items():
            if not step > 0:
                raise ValueError(f"grid step for {name!r} must be positive, got {step}")
        if self.default_step is not None and not self.default_step > 0:
            raise ValueError("default grid step must be positive")

    def values(self, space: SearchSpace) -> list[list[float]]:
        axes = []
        for p in space:
            if p.kind == "categorical":
                axes.append([float(i) for i in range(len(p.choices))])
                continue
            step = self.steps.get(p.name, self.default_step)
            if step is None:
                if p.kind == "continuous":
                    raise SpaceError(f"parameter {p.name!r}: continuous dimension needs a grid step")
                step = 1
            if p.kind == "integer" and float(step) != int(step):
                raise SpaceError(f"parameter {p.name!r}: integer grid step must be whole")
            lo, hi = p.effective_low, p.high
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            axes.append([lo + s * step for s in range(count)])
        return axes

    def cardinality(self, space: SearchSpace) -> int:
        return math.prod(len(a) for a in self.values(space))


def random_search(
    space: SearchSpace,
    budget: int,
    obj: ObjectiveHandle,
    seed: int = 0,
    distinct: bool = False,
    observer: Callable[[EvalRecord], None] | None = None,
    record_timing: bool = False,
) -> RunResult:
    """Evaluate ``budget`` independent uniform draws.

    With ``distinct=True`` drawing continues until ``budget`` uncached
    evaluations have been made, the space is exhausted, or ``100 * budget``
    draws have been spent.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    ev = Evaluator(space, obj, budget, observer=observer, record_timing=record_timing)
    card = space.cardinality()
    draws = 0
    reason = "budget"
    while True:
        if distinct:
            if ev.evaluations_used >= budget:
                break
            if card is not None and len(ev.cache) >= card:
                reason = "exhausted"
                break
            if draws >= 100 * budget:
                reason = "stalled"
                break
        elif draws >= budget:
            break
        ev.request(sample_uniform(space, rng), "baseline", 0)
        draws += 1
    return RunResult(
        method="random",
        best_config=decode(space, ev.best_config),
        best_objective=ev.best_value,
        evaluations_used=ev.evaluations_used,
        cycles=0,
        wall_time=time.perf_counter() - t0,
        records=ev.records,
        seed=seed,
        budget=budget,
        stop_reason=reason,
        cache_hits=ev.cache.hits,
    )


def grid_search(
    space: SearchSpace,
    grid: GridSpec,
    obj: ObjectiveHandle,
    cap: int = DEFAULT_GRID_CAP,
    observer: Callable[[EvalRecord], None] | None = None,
    record_timing: bool = False,
) -> RunResult:
    """Evaluate every grid point once, first dimension varying slowest."""
    axes = grid.values(space)
    size = math.prod(len(a) for a in axes)
    if size > cap:
        raise GridTooLarge(f"grid has {size} points, over the cap of {cap}")
    t0 = time.perf_counter()
    ev = Evaluator(space, obj, None, observer=observer, record_timing=record_timing)
    for point in itertools.product(*axes):
        ev.request(repair(space, point), "baseline", 0)
    return RunResult(
        method="grid",
        best_config=decode(space, ev.best_config),
        best_objective=ev.best_value,
        evaluations_used=ev.evaluations_used,
        cycles=0,
        wall_time=time.perf_counter() - t0,
        records=ev.records,
        budget=size,
        stop_reason="complete",
        cache_hits=ev.cache.hits,
        grid_size=size,
    )
