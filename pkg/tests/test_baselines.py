import pytest

from hypabc import ObjectiveHandle, bundled_space, validate_space
from hypabc.baselines import GridSpec, GridTooLarge, grid_search, random_search
from hypabc.evaluation import log_csv_text
from hypabc.objective import builtin_mixed_sphere
from hypabc.oracle import exhaustive_min
from hypabc.space import SpaceError


def test_integer_step_five():
    space = validate_space([{"name": "n", "type": "integer", "min": 5, "max": 15}])
    res = grid_search(space, GridSpec({"n": 5}), ObjectiveHandle(lambda a: float(a["n"])))
    assert [r.config["n"] for r in res.records] == [5, 10, 15]
    assert res.evaluations_used == 3 and res.grid_size == 3
    assert all(r.phase == "baseline" for r in res.records)


def test_rf_step_five_cardinality(rf_space):
    # 100 n_estimators x 2 criteria x 10 depths x 19 features x 6 splits x 3 leaves
    axes = GridSpec(default_step=5).values(rf_space)
    assert [len(a) for a in axes] == [100, 2, 10, 19, 6, 3]
    assert GridSpec(default_step=5).cardinality(rf_space) == 684_000


def test_grid_reaches_sphere_target(sphere3):
    res = grid_search(sphere3, GridSpec(), builtin_mixed_sphere(sphere3))
    assert res.best_objective == 0.0
    assert res.evaluations_used == 120 == res.grid_size
    assert len({tuple(r.config.values()) for r in res.records}) == 120


def test_grid_cap(rf_space):
    with pytest.raises(GridTooLarge, match="over the cap"):
        grid_search(rf_space, GridSpec(), builtin_mixed_sphere(rf_space))


def test_grid_continuous_needs_step():
    space = bundled_space("svm")
    with pytest.raises(SpaceError, match="grid step"):
        GridSpec().values(space)
    assert GridSpec({"C": 10.0}).values(space)[0] == [0.1, 10.1, 20.1, 30.1, 40.1]


def test_grid_exclusive_lower_bound_starts_inside():
    space = validate_space([{"name": "s", "type": "continuous", "min": 0, "max": 1, "lower_exclusive": True}])
    (axis,) = GridSpec({"s": 0.25}).values(space)
    assert axis[0] > 0 and len(axis) == 4


@pytest.mark.parametrize("step", [0, -1])
def test_grid_step_must_be_positive(step):
    with pytest.raises(ValueError):
        GridSpec({"n": step})


def test_random_budget_one(rf_space):
    res = random_search(rf_space, 1, builtin_mixed_sphere(rf_space), seed=3)
    assert res.evaluations_used == 1 and len(res.records) == 1


def test_random_budget_must_be_positive(rf_space):
    with pytest.raises(ValueError):
        random_search(rf_space, 0, builtin_mixed_sphere(rf_space))


def test_random_replay(rf_space):
    h = builtin_mixed_sphere(rf_space)
    a = random_search(rf_space, 60, h, seed=8)
    b = random_search(rf_space, 60, h, seed=8)
    assert log_csv_text(a.records) == log_csv_text(b.records)


def test_random_budget_counts_draws(sphere3):
    res = random_search(sphere3, 300, builtin_mixed_sphere(sphere3), seed=0)
    assert len(res.records) == 300
    assert res.evaluations_used <= 120
    assert res.evaluations_used + res.cache_hits == 300


def test_random_distinct_mode(sphere3):
    res = random_search(sphere3, 50, builtin_mixed_sphere(sphere3), seed=0, distinct=True)
    assert res.evaluations_used == 50
    full = random_search(sphere3, 500, builtin_mixed_sphere(sphere3), seed=0, distinct=True)
    assert full.evaluations_used == 120 and full.stop_reason == "exhausted"


def test_random_search_converges_to_oracle(sphere3):
    h = builtin_mixed_sphere(sphere3)
    _, best = exhaustive_min(sphere3, h)
    budget = 10 * sphere3.cardinality()
    wins = sum(random_search(sphere3, budget, h, seed=s).best_objective == best for s in range(100))
    assert wins >= 99
