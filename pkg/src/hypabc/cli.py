"""Command-line harness: ``hypabc run`` and ``hypabc summarize``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import shlex
import statistics
import subprocess
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .baselines import DEFAULT_GRID_CAP, GridSpec, GridTooLarge, grid_search, random_search
from .colony import DEFAULT_NP, ColonyParams, run
from .evaluation import RunResult, write_log_csv, write_log_json
from .objective import ObjectiveError, ObjectiveHandle, builtin_knn_cv, builtin_mixed_sphere
from .space import SearchSpace, SpaceError, load_space

METHODS = ("hypabc", "random", "grid")
OBJECTIVES = ("mixed_sphere", "knn_cv", "external")
_RESULT_KEYS = ("method", "best_objective", "evaluations_used", "wall_time")


class ConfigError(ValueError):
    pass


def external_objective(command: str, timeout_s: float | None = None) -> ObjectiveHandle:
    """Objective computed by a child process.

    The decoded assignment is written to a temporary JSON file whose path
    replaces ``{config}`` in ``command`` and is also exported as
    ``HYPABC_CONFIG``. The child's standard output must be a single number.
    """
    template = shlex.split(command)
    if not template:
        raise ConfigError("empty external command")

    def evaluate(assignment):
        fd, path = tempfile.mkstemp(prefix="hypabc-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(assignment, fh)
            argv = [a.replace("{config}", path) for a in template]
            env = {**os.environ, "HYPABC_CONFIG": path}
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout_s, env=env)
            except subprocess.TimeoutExpired:
                raise ObjectiveError(f"external command timed out after {timeout_s}s", assignment) from None
            except OSError as exc:
                raise ObjectiveError(f"cannot run external command: {exc}", assignment) from exc
        finally:
            os.unlink(path)
        if proc.returncode != 0:
            raise ObjectiveError(
                f"external command exited with status {proc.returncode}: {proc.stderr.strip()}",
                assignment,
            )
        out = proc.stdout.strip()
        try:
            value = float(out)
        except ValueError:
            raise ObjectiveError(f"cannot parse objective from output {out!r}", assignment) from None
        return value

    return ObjectiveHandle(evaluate, description=f"external: {command}", deterministic=False)


@dataclass
class RunConfig:
    methods: list[str]
    space_path: str
    objective: str
    budget: int
    nps: list[int] = field(default_factory=lambda: [DEFAULT_NP])
    trial_limit: int | None = None
    target: float | None = None
    seed: int = 0
    repeats: int = 1
    parallel_width: int = 1
    out_dir: str = "hypabc-out"
    grid_steps: str | None = None
    grid_cap: int = DEFAULT_GRID_CAP
    external_cmd: str | None = None
    timeout_s: float | None = None
    record_timing: bool = False

    def validate(self) -> None:
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}; choose from {', '.join(OBJECTIVES)}")
        if self.objective == "external" and not self.external_cmd:
            raise ConfigError("--objective external needs --external-cmd")
        if self.repeats < 1:
            raise ConfigError("--repeats must be at least 1")
        if self.budget < 1:
            raise ConfigError("--budget must be at least 1")
        if "hypabc" in self.methods:
            for n in self.nps:
                if n < 2:
                    raise ConfigError("--np must be at least 2")
                if self.budget < n:
                    raise ConfigError(f"budget ({self.budget}) is smaller than NP ({n})")


def parse_grid_steps(text: str | None) -> GridSpec:
    """``"5"`` sets one step for every numeric dimension; ``"a=5,b=0.1"`` sets them per name."""
    if not text:
        return GridSpec()
    if "=" not in text:
        return GridSpec(default_step=float(text))
    steps = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        steps[name.strip()] = float(value)
    return GridSpec(steps=steps)


def make_objective(cfg: RunConfig, space: SearchSpace) -> ObjectiveHandle:
    if cfg.objective == "mixed_sphere":
        return builtin_mixed_sphere(space)
    if cfg.objective == "knn_cv":
        try:
            return builtin_knn_cv(space)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return external_objective(cfg.external_cmd, cfg.timeout_s)


def _tag(result: RunResult) -> str:
    if result.method == "hypabc":
        return f"hypabc_np{result.np}_seed{result.seed}"
    if result.method == "random":
        return f"random_seed{result.seed}"
    return "grid"


def execute(cfg: RunConfig) -> list[RunResult]:
    """Run every (method, NP, repeat) combination and write logs and results."""
    cfg.validate()
    try:
        space = load_space(cfg.space_path)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read space file {cfg.space_path!r}: {exc}") from None
    obj = make_objective(cfg, space)
    grid = parse_grid_steps(cfg.grid_steps) if "grid" in cfg.methods else None
    if grid is not None:
        size = grid.cardinality(space)
        if size > cfg.grid_cap:
            raise GridTooLarge(f"grid has {size} points, over the cap of {cfg.grid_cap}")

    out = Path(cfg.out_dir)
    (out / "logs").mkdir(parents=True, exist_ok=True)
    (out / "results").mkdir(parents=True, exist_ok=True)
    with open(out / "run_config.json", "w") as fh:
        json.dump(asdict(cfg), fh, indent=2)
        fh.write("\n")

    results = []
    for method in cfg.methods:
        if method == "grid":
            results.append(grid_search(space, grid, obj, cap=cfg.grid_cap, record_timing=cfg.record_timing))
            continue
        for r in range(cfg.repeats):
            seed = cfg.seed + r
            if method == "random":
                results.append(random_search(space, cfg.budget, obj, seed=seed, record_timing=cfg.record_timing))
                continue
            for n in cfg.nps:
                params = ColonyParams(
                    population_number=n,
                    max_evaluations=cfg.budget,
                    trial_limit=cfg.trial_limit,
                    target_objective=cfg.target,
                    seed=seed,
                    parallel_width=cfg.parallel_width,
                )
                results.append(run(space, params, obj, record_timing=cfg.record_timing))

    for res in results:
        tag = _tag(res)
        write_log_csv(res.records, out / "logs" / f"{tag}.csv")
        write_log_json(res.records, out / "logs" / f"{tag}.json")
        with open(out / "results" / f"{tag}.json", "w") as fh:
            json.dump(res.to_dict(), fh, indent=2)
            fh.write("\n")

    rows = summarize([r.to_dict() for r in results])
    write_summary(rows, out / "summary.csv")
    (out / "summary.txt").write_text(format_summary(rows))
    return results


def _group_value(doc: Mapping, key: str):
    value = doc.get(key)
    if key == "np" and doc.get("method") != "hypabc":
        return ""
    return "" if value is None else value


def summarize(results: Sequence[Mapping], group_keys: Sequence[str] = ("method", "np")) -> list[dict]:
    """Aggregate result documents per distinct combination of ``group_keys``."""
    if not results:
        raise ValueError("nothing to summarize")
    for doc in results:
        missing = [k for k in _RESULT_KEYS if k not in doc]
        if missing:
            raise ValueError(f"inconsistent result schema: missing {missing}")
    groups: dict[tuple, list[Mapping]] = {}
    for doc in results:
        groups.setdefault(tuple(_group_value(doc, k) for k in group_keys), []).append(doc)
    rows = []
    for key, docs in groups.items():
        best = [float(d["best_objective"]) for d in docs]
        row = dict(zip(group_keys, key))
        row.update(
            runs=len(docs),
            median_best_objective=statistics.median(best),
            mean_best_objective=statistics.fmean(best),
            min_best_objective=min(best),
            median_best_accuracy=1.0 - statistics.median(best),
            mean_evaluations=statistics.fmean(float(d["evaluations_used"]) for d in docs),
            mean_wall_time_s=statistics.fmean(float(d["wall_time"]) for d in docs),
        )
        rows.append(row)
    return rows


def np_trend(rows: Iterable[Mapping]) -> str:
    """Describe how the HyP-ABC median best objective moves with NP (not a pass/fail check)."""
    pts = sorted(
        (int(r["np"]), float(r["median_best_objective"]))
        for r in rows
        if r.get("method") == "hypabc" and r.get("np") not in ("", None)
    )
    if len(pts) < 2:
        return ""
    values = [v for _, v in pts]
    seq = " -> ".join(f"NP={n}: {v:.6g}" for n, v in pts)
    if all(b == values[0] for b in values):
        verdict = "median best objective flat across NP"
    elif all(b <= a for a, b in zip(values, values[1:])):
        verdict = "median best objective non-increasing with NP"
    else:
        verdict = "median best objective not monotone in NP"
    return f"{verdict} ({seq})"


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_summary(rows: Sequence[Mapping], path) -> None:
    keys = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def format_summary(rows: Sequence[Mapping]) -> str:
    keys = list(rows[0].keys())
    cells = [keys] + [[_fmt(r[k]) for k in keys] for r in rows]
    widths = [max(len(row[j]) for row in cells) for j in range(len(keys))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    trend = np_trend(rows)
    if trend:
        lines.append("")
        lines.append(trend)
    return "\n".join(lines) + "\n"


def load_results(paths: Iterable[str | Path]) -> list[dict]:
    docs = []
    for p in paths:
        p = Path(p)
        files = sorted(p.glob("*.json")) if p.is_dir() else [p]
        for f in files:
            docs.append(json.loads(f.read_text()))
    return docs


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypabc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run HyP-ABC and/or baselines")
    r.add_argument("--method", default="hypabc", help="comma list of hypabc, random, grid")
    r.add_argument("--space", required=True, help="space file, or a bundled name (rf, xgboost, svm, knn, knn_grid, sphere3)")
    r.add_argument("--objective", default="mixed_sphere", help="mixed_sphere, knn_cv or external")
    r.add_argument("--budget", type=int, default=1000, help="maximum objective evaluations (cache hits are free)")
    r.add_argument("--np", default=str(DEFAULT_NP), help="population size, or a comma list for a sweep")
    r.add_argument("--trial-limit", type=int, default=None, help="default: NP * dimension")
    r.add_argument("--target", type=float, default=None, help="stop once the best objective is <= this")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--repeats", type=int, default=1, help="repeat r uses seed + r")
    r.add_argument("--parallel", type=int, default=1, help="concurrent evaluations in the employed phase")
    r.add_argument("--out-dir", default="hypabc-out")
    r.add_argument("--grid-steps", default=None, help='"5" or "name=step,..."')
    r.add_argument("--grid-cap", type=int, default=DEFAULT_GRID_CAP)
    r.add_argument("--external-cmd", default=None, help="command printing the objective; {config} is the JSON path")
    r.add_argument("--timeout-s", type=float, default=None)
    r.add_argument("--record-timing", action="store_true", help="fill elapsed_ms in logs (makes logs non-reproducible)")

    s = sub.add_parser("summarize", help="aggregate result documents")
    s.add_argument("results", nargs="+", help="result JSON files or directories")
    s.add_argument("--group-by", default="method,np", help="comma list of keys; empty for one global row")
    s.add_argument("--csv", default=None, help="also write the summary CSV here")
    return parser


def run_cli(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig(
                methods=[m.strip() for m in args.method.split(",") if m.strip()],
                space_path=args.space,
                objective=args.objective,
                budget=args.budget,
                nps=_int_list(args.np),
                trial_limit=args.trial_limit,
                target=args.target,
                seed=args.seed,
                repeats=args.repeats,
                parallel_width=args.parallel,
                out_dir=args.out_dir,
                grid_steps=args.grid_steps,
                grid_cap=args.grid_cap,
                external_cmd=args.external_cmd,
                timeout_s=args.timeout_s,
                record_timing=args.record_timing,
            )
            execute(cfg)
            print((Path(cfg.out_dir) / "summary.txt").read_text(), end="")
        else:
            keys = [k for k in args.group_by.split(",") if k.strip()]
            rows = summarize(load_results(args.results), keys)
            if args.csv:
                write_summary(rows, args.csv)
            print(format_summary(rows), end="")
    except (ConfigError, SpaceError, GridTooLarge, ObjectiveError, FileNotFoundError, ValueError) as exc:
        print(f"hypabc: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
