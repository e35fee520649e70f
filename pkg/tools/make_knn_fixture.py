"""Regenerate the exhaustive optimum fixture for the 150-point kNN grid.

    python tools/make_knn_fixture.py
"""

from pathlib import Path

from hypabc.objective import DEFAULT_DATASET_SEED, builtin_knn_cv
from hypabc.oracle import exhaustive_min, make_fixture, save_fixture
from hypabc.space import bundled_space

OUT = Path(__file__).resolve().parents[1] / "src" / "hypabc" / "fixtures" / "knn_grid_oracle.json"

if __name__ == "__main__":
    space = bundled_space("knn_grid")
    config, value = exhaustive_min(space, builtin_knn_cv(space))
    fixture = make_fixture(space, config, value, seed=DEFAULT_DATASET_SEED)
    save_fixture(OUT, fixture)
    print(fixture)
