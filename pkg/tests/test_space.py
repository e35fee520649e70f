import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypabc.space import (
    EPSILON_LB,
    ParamSpec,
    SearchSpace,
    SpaceError,
    decode,
    encode,
    flip_binary,
    from_unit,
    neighbor,
    repair,
    sample_uniform,
    validate_space,
)


def space_of(*entries):
    return validate_space(list(entries))


INT_5_500 = {"name": "n", "type": "integer", "min": 5, "max": 500}
UNIT_EXCL = {"name": "s", "type": "continuous", "min": 0, "max": 1, "lower_exclusive": True}


# -- validate_space ---------------------------------------------------------

def test_rf_space_has_six_dimensions(rf_space):
    assert rf_space.dimension == 6
    assert rf_space.names == [
        "n_estimators", "criterion", "max_depth", "max_features",
        "min_samples_split", "min_samples_leaf",
    ]
    assert (rf_space["n_estimators"].lower, rf_space["n_estimators"].upper) == (5, 500)
    assert rf_space["criterion"].choices == ("gini", "entropy")
    assert (rf_space["max_features"].lower, rf_space["max_features"].upper) == (1, 91)


def test_single_continuous_param():
    assert space_of({"name": "x", "type": "continuous", "min": 0, "max": 1}).dimension == 1


@pytest.mark.parametrize(
    "entry, fragment",
    [
        ({"name": "x", "type": "continuous", "min": 1, "max": 1}, "degenerate bounds"),
        ({"name": "x", "type": "integer", "min": 3, "max": 1}, "degenerate bounds"),
        ({"name": "x", "type": "categorical", "choices": []}, "empty choices"),
        ({"name": "x", "type": "categorical", "choices": ["a", "a"]}, "duplicate"),
        ({"name": "x", "type": "ordinal", "min": 0, "max": 1}, "unknown kind"),
        ({"name": "x", "type": "integer", "min": 0.5, "max": 4}, "whole numbers"),
        ({"name": "x", "type": "integer", "min": 0, "max": 4, "lower_exclusive": True}, "lower_exclusive"),
        ({"name": "x", "type": "continuous", "min": "a", "max": 4}, "must be a number"),
    ],
)
def test_invalid_params_name_the_offender(entry, fragment):
    with pytest.raises(SpaceError, match=fragment) as info:
        space_of(entry)
    assert "'x'" in str(info.value)


def test_duplicate_names_rejected():
    with pytest.raises(SpaceError, match="duplicate name"):
        space_of(INT_5_500, INT_5_500)


def test_empty_space_rejected():
    with pytest.raises(SpaceError):
        validate_space([])


def test_round_trip_through_document(rf_space):
    assert validate_space(rf_space.to_list()) == rf_space
    assert rf_space.digest() == validate_space(rf_space.to_list()).digest()


def test_bundled_tables():
    from hypabc import bundled_space

    xgb = bundled_space("xgboost")
    assert xgb["subsample"].lower_exclusive and xgb["colsample_bytree"].lower_exclusive
    assert not xgb["learning_rate"].lower_exclusive
    svm = bundled_space("svm")
    assert (svm["C"].lower, svm["C"].upper) == (0.1, 50)
    assert svm["kernel"].choices == ("linear", "poly", "rbf", "sigmoid")
    assert bundled_space("knn_grid").cardinality() == 150
    assert bundled_space("sphere3").cardinality() == 120


# -- sample_uniform / from_unit --------------------------------------------

def test_unit_draw_endpoints():
    s = space_of(INT_5_500)
    assert from_unit(s, [0.0]) == (5.0,)
    assert from_unit(s, [1.0]) == (500.0,)


def test_categorical_draw_rounds_to_nearest_index():
    s = space_of({"name": "kernel", "type": "categorical", "choices": ["a", "b", "c", "d"]})
    # 0 + 0.6 * (3 - 0) = 1.8 -> 2
    assert from_unit(s, [0.6]) == (2.0,)


def test_exclusive_lower_bound_draw_is_repaired():
    s = space_of(UNIT_EXCL)
    assert from_unit(s, [0.0]) == (EPSILON_LB,)


def test_sample_uniform_is_seeded(rf_space):
    a = [sample_uniform(rf_space, np.random.default_rng(3)) for _ in range(2)]
    assert a[0] == a[1]


# -- repair ----------------------------------------------------------------

@pytest.mark.parametrize("raw, expected", [(520.0, 500.0), (6.8, 7.0), (6.5, 7.0), (-3.0, 5.0), (42.0, 42.0)])
def test_repair_integer(raw, expected):
    assert repair(space_of(INT_5_500), [raw]) == (expected,)


def test_repair_rounds_half_away_from_zero():
    s = space_of({"name": "z", "type": "integer", "min": -10, "max": 10})
    assert repair(s, [-2.5]) == (-3.0,)
    assert repair(s, [2.5]) == (3.0,)


def test_repair_exclusive_lower_bound():
    s = space_of(UNIT_EXCL)
    (v,) = repair(s, [-0.3])
    assert v == EPSILON_LB and v > 0
    assert s[0].effective_low <= v <= s[0].high


def test_repair_continuous_is_clamp_only():
    s = space_of({"name": "C", "type": "continuous", "min": 0.1, "max": 50})
    assert repair(s, [3.14159]) == (3.14159,)
    assert repair(s, [99.0]) == (50.0,)


def test_repair_length_mismatch(rf_space):
    with pytest.raises(SpaceError):
        repair(rf_space, [1.0, 2.0])


# -- neighbor / flip_binary ------------------------------------------------

def test_neighbor_continuous():
    s = space_of({"name": "x", "type": "continuous", "min": 0, "max": 100})
    # 10 + 0.5 * (10 - 6)
    assert neighbor(s, (10.0,), (6.0,), 0, 0.5) == (12.0,)


def test_neighbor_integer_rounds():
    s = space_of({"name": "x", "type": "integer", "min": 0, "max": 100})
    # 10 - 0.8 * (10 - 6) = 6.8 -> 7
    assert neighbor(s, (10.0,), (6.0,), 0, -0.8) == (7.0,)


def test_neighbor_zero_step_is_identity(rf_space):
    rng = np.random.default_rng(0)
    a, b = sample_uniform(rf_space, rng), sample_uniform(rf_space, rng)
    for dim in range(len(rf_space)):
        assert neighbor(rf_space, a, b, dim, 0.0) == a


def test_neighbor_dim_out_of_range(rf_space):
    c = sample_uniform(rf_space, np.random.default_rng(0))
    with pytest.raises(IndexError):
        neighbor(rf_space, c, c, 6, 0.1)


def test_neighbor_binary_flip(rf_space):
    c = repair(rf_space, [150, 0, 10, 10, 10, 10])
    moved = neighbor(rf_space, c, c, 1, 0.0, binary_flip=True)
    assert moved[1] == 1.0 and moved[:1] == c[:1] and moved[2:] == c[2:]


def test_flip_binary_gini_entropy(rf_space):
    gini = repair(rf_space, [150, 0, 10, 10, 10, 10])
    entropy = flip_binary(rf_space, gini, 1)
    assert decode(rf_space, entropy)["criterion"] == "entropy"
    assert decode(rf_space, flip_binary(rf_space, entropy, 1))["criterion"] == "gini"
    assert flip_binary(rf_space, entropy, 1) == gini


def test_flip_binary_rejects_non_binary(rf_space):
    c = repair(rf_space, [150, 0, 10, 10, 10, 10])
    with pytest.raises(SpaceError):
        flip_binary(rf_space, c, 0)
    svm = validate_space([{"name": "kernel", "type": "categorical", "choices": ["a", "b", "c"]}])
    with pytest.raises(SpaceError):
        flip_binary(svm, (0.0,), 0)


# -- decode / encode -------------------------------------------------------

def test_decode_rf(rf_space):
    c = repair(rf_space, [150, 1, 20, 30, 4, 2])
    assert decode(rf_space, c) == {
        "n_estimators": 150, "criterion": "entropy", "max_depth": 20,
        "max_features": 30, "min_samples_split": 4, "min_samples_leaf": 2,
    }
    assert isinstance(decode(rf_space, c)["n_estimators"], int)
    assert encode(rf_space, decode(rf_space, c)) == c


def test_decode_index_zero_is_first_label():
    s = validate_space([{"name": "kernel", "type": "categorical", "choices": ["linear", "poly"]}])
    assert decode(s, (0.0,)) == {"kernel": "linear"}


def test_encode_unknown_label():
    s = validate_space([{"name": "kernel", "type": "categorical", "choices": ["linear", "poly"]}])
    with pytest.raises(SpaceError, match="unknown choice"):
        encode(s, {"kernel": "rbf"})


# -- properties over random spaces -----------------------------------------

@st.composite
def param_specs(draw, name):
    kind = draw(st.sampled_from(["integer", "continuous", "categorical"]))
    if kind == "categorical":
        n = draw(st.integers(1, 6))
        return ParamSpec(name, kind, choices=tuple(f"c{i}" for i in range(n)))
    if kind == "integer":
        lo = draw(st.integers(-1000, 1000))
        return ParamSpec(name, kind, float(lo), float(lo + draw(st.integers(1, 1000))))
    lo = draw(st.floats(-1e3, 1e3, allow_nan=False))
    width = draw(st.floats(1e-3, 1e3))
    return ParamSpec(name, kind, lo, lo + width, lower_exclusive=draw(st.booleans()))


@st.composite
def spaces(draw):
    d = draw(st.integers(1, 6))
    return SearchSpace(tuple(draw(param_specs(f"p{j}")) for j in range(d)))


def in_bounds_and_typed(space, config):
    for p, x in zip(space, config):
        assert p.effective_low <= x <= p.high
        if p.is_discrete:
            assert x == math.floor(x)


@settings(max_examples=200, deadline=None)
@given(spaces(), st.integers(0, 2**32 - 1))
def test_samples_are_in_bounds_fixed_points(space, seed):
    c = sample_uniform(space, np.random.default_rng(seed))
    in_bounds_and_typed(space, c)
    assert repair(space, c) == c


@settings(max_examples=200, deadline=None)
@given(spaces(), st.data())
def test_repair_idempotent_and_bounded(space, data):
    raw = [data.draw(st.floats(-1e6, 1e6, allow_nan=False)) for _ in range(len(space))]
    once = repair(space, raw)
    in_bounds_and_typed(space, once)
    assert repair(space, once) == once


@settings(max_examples=200, deadline=None)
@given(spaces(), st.integers(0, 2**32 - 1), st.floats(-1, 1), st.booleans())
def test_neighbor_changes_at_most_one_dimension(space, seed, phi, flip):
    rng = np.random.default_rng(seed)
    a, b = sample_uniform(space, rng), sample_uniform(space, rng)
    dim = int(rng.integers(len(space)))
    m = neighbor(space, a, b, dim, phi, binary_flip=flip)
    in_bounds_and_typed(space, m)
    assert all(m[j] == a[j] for j in range(len(space)) if j != dim)
    assert repair(space, m) == m


@settings(max_examples=100, deadline=None)
@given(spaces(), st.integers(0, 2**32 - 1))
def test_flip_is_involution_and_decode_encode_identity(space, seed):
    c = sample_uniform(space, np.random.default_rng(seed))
    assert encode(space, decode(space, c)) == c
    for j, p in enumerate(space):
        if p.is_binary:
            assert flip_binary(space, flip_binary(space, c, j), j) == c
