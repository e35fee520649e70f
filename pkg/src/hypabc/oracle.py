"""Exhaustive ground truth for small discrete spaces."""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .objective import ObjectiveHandle
from .space import Configuration, SearchSpace, SpaceError, decode, encode, repair

DEFAULT_CAP = 10**6


def _axes(space: SearchSpace, discretization: Mapping[str, Sequence[float]] | None) -> list[list[float]]:
    discretization = discretization or {}
    axes = []
    for p in space:
        if p.name in discretization:
            axes.append([float(v) for v in discretization[p.name]])
        elif p.kind == "continuous":
            raise SpaceError(f"parameter {p.name!r}: continuous dimension needs an explicit discretization")
        else:
            axes.append([float(v) for v in range(int(p.low), int(p.high) + 1)])
    return axes


def enumerate_space(
    space: SearchSpace,
    discretization: Mapping[str, Sequence[float]] | None = None,
    cap: int = DEFAULT_CAP,
) -> Iterator[Configuration]:
    """Yield every configuration once in lexicographic order (first dimension slowest)."""
    axes = _axes(space, discretization)
    total = math.prod(len(a) for a in axes)
    if total > cap:
        raise SpaceError(f"space has {total} points, over the enumeration cap of {cap}")
    for point in itertools.product(*axes):
        yield repair(space, point)


def exhaustive_min(
    space: SearchSpace,
    obj: ObjectiveHandle,
    discretization: Mapping[str, Sequence[float]] | None = None,
    cap: int = DEFAULT_CAP,
    n_jobs: int = 1,
) -> tuple[Configuration, float]:
    """Global minimum; ties go to the first point in enumeration order."""
    points = list(enumerate_space(space, discretization, cap))

    def value(c):
        return float(obj.evaluate(decode(space, c)))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            values = list(pool.map(value, points))
    else:
        values = [value(c) for c in points]
    best = min(range(len(points)), key=lambda j: (values[j], j))
    return points[best], values[best]


def make_fixture(space: SearchSpace, config: Configuration, value: float, seed: int) -> dict:
    return {
        "space_hash": space.digest(),
        "seed": seed,
        "best_config": decode(space, config),
        "best_value": value,
    }


def save_fixture(path, fixture: dict) -> None:
    with open(path, "w") as fh:
        json.dump(fixture, fh, indent=2)
        fh.write("\n")


def load_fixture(path_or_name, space: SearchSpace | None = None) -> dict:
    """Read a fixture; bare names resolve to the bundled fixtures.

    When ``space`` is given the stored hash must match it.
    """
    p = Path(path_or_name)
    if p.exists():
        fixture = json.loads(p.read_text())
    else:
        ref = resources.files("hypabc") / "fixtures" / f"{path_or_name}.json"
        fixture = json.loads(ref.read_text())
    if space is not None:
        if fixture["space_hash"] != space.digest():
            raise ValueError("fixture was computed for a different search space")
        encode(space, fixture["best_config"])
    return fixture
