"""Mixed integer / categorical / continuous search spaces.

A configuration is stored as a tuple of floats, one per dimension. Integer
dimensions hold whole-valued floats, categorical dimensions hold the index
of the chosen label. Every stored configuration is a fixed point of
:func:`repair`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

KINDS = ("integer", "continuous", "categorical")

#: Offset applied to exclusive lower bounds, e.g. ``(0, 1]`` clamps to ``1e-6``.
EPSILON_LB = 1e-6

Configuration = tuple  # tuple[float, ...]


class SpaceError(ValueError):
    """Raised for malformed search-space definitions."""


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str
    lower: float | None = None
    upper: float | None = None
    choices: tuple[str, ...] = ()
    lower_exclusive: bool = False

    def __post_init__(self):
        name = self.name
        if not isinstance(name, str) or not name:
            raise SpaceError(f"invalid parameter name {name!r}")
        if self.kind not in KINDS:
            raise SpaceError(f"parameter {name!r}: unknown kind {self.kind!r}")
        if self.kind == "categorical":
            if not self.choices:
                raise SpaceError(f"parameter {name!r}: empty choices")
            if len(set(self.choices)) != len(self.choices):
                raise SpaceError(f"parameter {name!r}: duplicate choice labels")
            if self.lower_exclusive:
                raise SpaceError(f"parameter {name!r}: lower_exclusive only applies to continuous")
            return
        if self.lower is None or self.upper is None:
            raise SpaceError(f"parameter {name!r}: missing bounds")
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise SpaceError(f"parameter {name!r}: bounds must be finite")
        if self.lower >= self.upper:
            raise SpaceError(
                f"parameter {name!r}: degenerate bounds (lower={self.lower}, upper={self.upper})"
            )
        if self.kind == "integer":
            if float(self.lower) != int(self.lower) or float(self.upper) != int(self.upper):
                raise SpaceError(f"parameter {name!r}: integer bounds must be whole numbers")
            if self.lower_exclusive:
                raise SpaceError(f"parameter {name!r}: lower_exclusive only applies to continuous")

    @cached_property
    def low(self) -> float:
        """Lower end of the encoded range (before any exclusive offset)."""
        return 0.0 if self.kind == "categorical" else float(self.lower)

    @cached_property
    def high(self) -> float:
        return float(len(self.choices) - 1) if self.kind == "categorical" else float(self.upper)

    @cached_property
    def effective_low(self) -> float:
        return self.low + EPSILON_LB if self.lower_exclusive else self.low

    @cached_property
    def is_discrete(self) -> bool:
        return self.kind != "continuous"

    @cached_property
    def is_binary(self) -> bool:
        return self.kind == "categorical" and len(self.choices) == 2

    @property
    def cardinality(self) -> int | None:
        if self.kind == "categorical":
            return len(self.choices)
        if self.kind == "integer":
            return int(self.upper) - int(self.lower) + 1
        return None

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "categorical":
            return {"name": self.name, "type": self.kind, "choices": list(self.choices)}
        out: dict[str, Any] = {"name": self.name, "type": self.kind}
        if self.kind == "integer":
            out["min"], out["max"] = int(self.lower), int(self.upper)
        else:
            out["min"], out["max"] = self.lower, self.upper
        if self.lower_exclusive:
            out["lower_exclusive"] = True
        return out


@dataclass(frozen=True)
class SearchSpace:
    params: tuple[ParamSpec, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.params:
            raise SpaceError("search space needs at least one parameter")
        index = {}
        for j, p in enumerate(self.params):
            if p.name in index:
                raise SpaceError(f"parameter {p.name!r}: duplicate name")
            index[p.name] = j
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.params)

    def __iter__(self):
        return iter(self.params)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.params[self._index[key]]
        return self.params[key]

    @property
    def dimension(self) -> int:
        return len(self.params)

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.params]

    def index(self, name: str) -> int:
        return self._index[name]

    def cardinality(self) -> int | None:
        """Number of distinct configurations, or None when any dimension is continuous."""
        total = 1
        for p in self.params:
            c = p.cardinality
            if c is None:
                return None
            total *= c
        return total

    def to_list(self) -> list[dict[str, Any]]:
        return [p.to_dict() for p in self.params]

    def digest(self) -> str:
        """Stable SHA-256 of the canonical JSON form."""
        blob = json.dumps(self.to_list(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _number(raw: Mapping, key: str, name: str) -> float:
    value = raw.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpaceError(f"parameter {name!r}: {key!r} must be a number, got {value!r}")
    return float(value)


def validate_space(raw_spec: Sequence[Mapping[str, Any]]) -> SearchSpace:
    """Build a :class:`SearchSpace` from the parsed space-file document.

    The document is a list of entries
    ``{name, type, min, max, lower_exclusive?, choices?}``. Any problem is
    reported as a :class:`SpaceError` naming the offending parameter.
    """
    if isinstance(raw_spec, Mapping) and "params" in raw_spec:
        raw_spec = raw_spec["params"]
    if not isinstance(raw_spec, Sequence) or isinstance(raw_spec, (str, bytes)):
        raise SpaceError("space document must be a list of parameter entries")
    params = []
    for pos, raw in enumerate(raw_spec):
        if not isinstance(raw, Mapping):
            raise SpaceError(f"entry {pos}: expected an object, got {type(raw).__name__}")
        name = raw.get("name", f"<entry {pos}>")
        kind = raw.get("type")
        if kind not in KINDS:
            raise SpaceError(f"parameter {name!r}: unknown kind {kind!r}")
        if kind == "categorical":
            choices = raw.get("choices")
            if not isinstance(choices, Sequence) or isinstance(choices, str):
                raise SpaceError(f"parameter {name!r}: choices must be a list")
            params.append(
                ParamSpec(
                    name=name,
                    kind=kind,
                    choices=tuple(str(c) for c in choices),
                    lower_exclusive=bool(raw.get("lower_exclusive", False)),
                )
            )
        else:
            params.append(
                ParamSpec(
                    name=name,
                    kind=kind,
                    lower=_number(raw, "min", name),
                    upper=_number(raw, "max", name),
                    lower_exclusive=bool(raw.get("lower_exclusive", False)),
                )
            )
    return SearchSpace(tuple(params))


def load_space(path: str | Path) -> SearchSpace:
    """Read a space file, or one of the bundled spaces by bare name (``"rf"``, ``"knn"``...)."""
    p = Path(path)
    if not p.exists() and p.suffix == "" and p.parent == Path("."):
        return bundled_space(str(path))
    with open(p) as fh:
        return validate_space(json.load(fh))


def bundled_space(name: str) -> SearchSpace:
    ref = resources.files("hypabc") / "spaces" / f"{name}.json"
    if not ref.is_file():
        available = sorted(
            f.name[:-5] for f in (resources.files("hypabc") / "spaces").iterdir()
            if f.name.endswith(".json")
        )
        raise FileNotFoundError(f"no bundled space {name!r}; available: {', '.join(available)}")
    return validate_space(json.loads(ref.read_text()))


def _round_half_away(x: float) -> float:
    return float(math.copysign(math.floor(abs(x) + 0.5), x))


def _repair_value(p: ParamSpec, x: float) -> float:
    lo, hi = p.effective_low, p.high
    x = min(max(float(x), lo), hi)
    if p.is_discrete:
        x = _round_half_away(x)
    return x + 0.0  # normalise -0.0


def repair(space: SearchSpace, raw: Sequence[float]) -> Configuration:
    """Clamp every coordinate into bounds and round the discrete ones.

    Rounding is half-away-from-zero. The result is always a fixed point:
    ``repair(space, repair(space, x)) == repair(space, x)``.
    """
    if len(raw) != len(space):
        raise SpaceError(f"configuration has {len(raw)} values, space has {len(space)} dimensions")
    return tuple(_repair_value(p, x) for p, x in zip(space.params, raw))


def from_unit(space: SearchSpace, u: Sequence[float]) -> Configuration:
    """Map unit-cube coordinates to a configuration: ``low + u * (high - low)``, then repair."""
    return repair(space, [p.low + float(uj) * (p.high - p.low) for p, uj in zip(space.params, u)])


def sample_uniform(space: SearchSpace, rng: np.random.Generator) -> Configuration:
    return from_unit(space, rng.random(len(space)))


def _check_dim(space: SearchSpace, dim: int) -> None:
    if not 0 <= dim < len(space):
        raise IndexError(f"dimension {dim} out of range for {len(space)}-dimensional space")


def flip_binary(space: SearchSpace, current: Configuration, dim: int) -> Configuration:
    """Invert the encoded bit of a two-choice categorical dimension."""
    _check_dim(space, dim)
    if not space[dim].is_binary:
        raise SpaceError(f"parameter {space[dim].name!r} is not a binary categorical")
    out = list(current)
    out[dim] = float(int(current[dim]) ^ 1)
    return tuple(out)


def neighbor(
    space: SearchSpace,
    current: Configuration,
    other: Configuration,
    dim: int,
    phi: float,
    binary_flip: bool = False,
) -> Configuration:
    """Move one coordinate of ``current`` relative to ``other``.

    The coordinate ``dim`` becomes ``x_i + phi * (x_i - x_k)`` and is then
    repaired; every other coordinate is copied unchanged. With
    ``binary_flip=True`` a two-choice categorical coordinate is flipped
    instead.
    """
    _check_dim(space, dim)
    p = space[dim]
    if binary_flip and p.is_binary:
        return flip_binary(space, current, dim)
    out = list(current)
    xi = current[dim]
    out[dim] = _repair_value(p, xi + phi * (xi - other[dim]))
    return tuple(out)


def decode(space: SearchSpace, config: Configuration) -> dict[str, Any]:
    """Named assignment with labels for categoricals and ints for integers."""
    out: dict[str, Any] = {}
    for p, x in zip(space.params, config):
        if p.kind == "categorical":
            out[p.name] = p.choices[int(x)]
        elif p.kind == "integer":
            out[p.name] = int(x)
        else:
            out[p.name] = float(x)
    return out


def encode(space: SearchSpace, assignment: Mapping[str, Any]) -> Configuration:
    missing = [n for n in space.names if n not in assignment]
    if missing:
        raise SpaceError(f"assignment is missing parameters: {', '.join(missing)}")
    raw = []
    for p in space.params:
        value = assignment[p.name]
        if p.kind == "categorical":
            try:
                raw.append(float(p.choices.index(str(value))))
            except ValueError:
                raise SpaceError(f"parameter {p.name!r}: unknown choice {value!r}") from None
        else:
            raw.append(float(value))
    return repair(space, raw)
