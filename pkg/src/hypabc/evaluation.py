"""Budgeted evaluation sessions, evaluation logs and run results."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from .objective import EvalCache, ObjectiveHandle, _call_objective
from .space import Configuration, SearchSpace, decode

PHASES = ("init", "employed", "onlooker", "scout", "baseline")
LOG_COLUMNS = (
    "eval_index", "cycle", "phase", "objective", "best_so_far",
    "cache_hit", "elapsed_ms", "config_json",
)


class StopSearch(Exception):
    reason = "stopped"


class BudgetExhausted(StopSearch):
    reason = "budget"


class TargetReached(StopSearch):
    reason = "target"


@dataclass
class EvalRecord:
    eval_index: int
    cycle: int
    phase: str
    config: dict
    objective: float
    best_so_far: float
    cache_hit: bool
    elapsed: float | None = None  # seconds; None when timing is not recorded
    source: int | None = None  # food-source index challenged, if any

    def row(self) -> dict[str, str]:
        return {
            "eval_index": str(self.eval_index),
            "cycle": str(self.cycle),
            "phase": self.phase,
            "objective": repr(self.objective),
            "best_so_far": repr(self.best_so_far),
            "cache_hit": "true" if self.cache_hit else "false",
            "elapsed_ms": "" if self.elapsed is None else f"{self.elapsed * 1e3:.3f}",
            "config_json": json.dumps(self.config),
        }

    def to_dict(self) -> dict[str, Any]:
        d = {
            "eval_index": self.eval_index,
            "cycle": self.cycle,
            "phase": self.phase,
            "objective": self.objective,
            "best_so_far": self.best_so_far,
            "cache_hit": self.cache_hit,
            "elapsed_ms": None if self.elapsed is None else self.elapsed * 1e3,
            "config": self.config,
        }
        return d


class Evaluator:
    """Evaluation session shared by the colony and the baselines.

    Counts only cache misses against ``max_evaluations``. Every request,
    hit or miss, is logged as an :class:`EvalRecord` and forwarded to
    ``observer`` in request order.
    """

    def __init__(
        self,
        space: SearchSpace,
        handle: ObjectiveHandle,
        max_evaluations: int | None = None,
        cache: EvalCache | None = None,
        observer: Callable[[EvalRecord], None] | None = None,
        record_timing: bool = False,
    ):
        self.space = space
        self.handle = handle
        self.max_evaluations = max_evaluations
        self.cache = cache if cache is not None else EvalCache()
        self.observer = observer
        self.record_timing = record_timing
        self.records: list[EvalRecord] = []
        self.evaluations_used = 0
        self.best_value = math.inf
        self.best_config: Configuration | None = None
        self._pending: dict[tuple, tuple[float, float]] = {}

    @property
    def remaining(self) -> float:
        if self.max_evaluations is None:
            return math.inf
        return self.max_evaluations - self.evaluations_used

    def _compute(self, config: Configuration) -> tuple[float, float]:
        t0 = time.perf_counter()
        value = _call_objective(self.handle, decode(self.space, config))
        return value, time.perf_counter() - t0

    def prefetch(self, configs: Iterable[Configuration], width: int) -> None:
        """Compute upcoming misses concurrently.

        Only configurations that would be misses, in order and within the
        remaining budget, are computed. Results are held aside and consumed
        by :meth:`request`, so logging and accounting stay in request order.
        """
        todo, seen = [], set()
        for c in configs:
            key = self.cache.key(c)
            if key in self.cache.values or key in seen:
                continue
            if len(todo) >= self.remaining:
                break
            seen.add(key)
            todo.append(c)
        if not todo:
            return
        with ThreadPoolExecutor(max_workers=width) as pool:
            results = list(pool.map(self._compute, todo))
        for c, res in zip(todo, results):
            self._pending[self.cache.key(c)] = res

    def discard_pending(self) -> None:
        self._pending.clear()

    def request(self, config: Configuration, phase: str, cycle: int, source: int | None = None) -> tuple[float, bool]:
        key = self.cache.key(config)
        elapsed = None
        if key in self.cache.values:
            value = self.cache.values[key]
            self.cache.hits += 1
            hit = True
        else:
            if self.remaining <= 0:
                raise BudgetExhausted()
            if key in self._pending:
                value, dt = self._pending.pop(key)
            else:
                value, dt = self._compute(config)
            self.cache.store(config, value)
            self.cache.misses += 1
            self.evaluations_used += 1
            hit = False
            elapsed = dt if self.record_timing else None
            assert self.max_evaluations is None or self.evaluations_used <= self.max_evaluations
        if value < self.best_value:
            self.best_value = value
            self.best_config = config
        rec = EvalRecord(
            eval_index=len(self.records),
            cycle=cycle,
            phase=phase,
            config=decode(self.space, config),
            objective=value,
            best_so_far=self.best_value,
            cache_hit=hit,
            elapsed=elapsed,
            source=source,
        )
        self.records.append(rec)
        if self.observer is not None:
            self.observer(rec)
        return value, hit


@dataclass
class RunResult:
    method: str
    best_config: dict
    best_objective: float
    evaluations_used: int
    cycles: int
    wall_time: float
    records: list[EvalRecord] = field(default_factory=list, repr=False)
    seed: int | None = None
    np: int | None = None
    budget: int | None = None
    stop_reason: str = ""
    cache_hits: int = 0
    grid_size: int | None = None

    @property
    def best_accuracy(self) -> float:
        return 1.0 - self.best_objective

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("records")
        d["best_accuracy"] = self.best_accuracy
        return d


def write_log_csv(records: Sequence[EvalRecord], path_or_buf) -> None:
    own = isinstance(path_or_buf, (str, Path))
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.DictWriter(fh, fieldnames=LOG_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow(r.row())
    finally:
        if own:
            fh.close()


def log_csv_text(records: Sequence[EvalRecord]) -> str:
    buf = io.StringIO()
    write_log_csv(records, buf)
    return buf.getvalue()


def write_log_json(records: Sequence[EvalRecord], path) -> None:
    with open(path, "w") as fh:
        json.dump([r.to_dict() for r in records], fh, indent=1)
        fh.write("\n")


def read_log_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != LOG_COLUMNS:
            raise ValueError(f"{path}: unexpected log columns {reader.fieldnames}")
        return list(reader)
