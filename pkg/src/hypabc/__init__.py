"""Artificial bee colony hyper-parameter search (HyP-ABC) with baselines and an exhaustive oracle."""

from .baselines import GridSpec, grid_search, random_search
from .colony import (
    ColonyParams,
    ColonyState,
    FoodSource,
    attempt_improvement,
    employed_phase,
    fitness_of,
    initialize,
    onlooker_phase,
    run,
    scout_phase,
    selection_probabilities,
)
from .evaluation import EvalRecord, Evaluator, RunResult
from .objective import (
    Dataset,
    EvalCache,
    ObjectiveError,
    ObjectiveHandle,
    builtin_knn_cv,
    builtin_mixed_sphere,
    cached_evaluate,
    generate_dataset,
    kfold_cv,
)
from .oracle import enumerate_space, exhaustive_min
from .space import (
    ParamSpec,
    SearchSpace,
    SpaceError,
    bundled_space,
    decode,
    encode,
    flip_binary,
    load_space,
    neighbor,
    repair,
    sample_uniform,
    validate_space,
)

__all__ = [
    "attempt_improvement",
    "builtin_knn_cv",
    "builtin_mixed_sphere",
    "bundled_space",
    "cached_evaluate",
    "ColonyParams",
    "ColonyState",
    "Dataset",
    "decode",
    "employed_phase",
    "encode",
    "enumerate_space",
    "EvalCache",
    "EvalRecord",
    "Evaluator",
    "exhaustive_min",
    "fitness_of",
    "flip_binary",
    "FoodSource",
    "generate_dataset",
    "grid_search",
    "GridSpec",
    "initialize",
    "kfold_cv",
    "load_space",
    "neighbor",
    "ObjectiveError",
    "ObjectiveHandle",
    "onlooker_phase",
    "ParamSpec",
    "random_search",
    "repair",
    "run",
    "RunResult",
    "sample_uniform",
    "scout_phase",
    "SearchSpace",
    "selection_probabilities",
    "SpaceError",
    "validate_space",
]

__version__ = "0.1.0"
