"""Model structure, validation, normalization, and JSON round trips."""

import random
from fractions import Fraction

import pytest

from generators import grid_feasible, iter_grid, random_grid_model, satisfies
from pwlmip.emip import (
    EmipConstraint,
    EmipModel,
    InvalidModelError,
    Objective,
    Variable,
    VarKind,
    is_normalized,
    normalize,
    normalize_with_map,
    validate,
)
from pwlmip.pwl import PwlFunction, Shape

F = Fraction


def _var(name, lower=0, upper=6, kind=VarKind.INTEGER):
    return Variable(name, kind, lower, upper)


# ---------------------------------------------------------------------------
# construction and queries
# ---------------------------------------------------------------------------


def test_constraint_holds_boundary():
    fn = PwlFunction(Shape.CONVEX, 0, (2,), (1, 3))
    cons = EmipConstraint(lhs={0: fn}, rhs={1: 2}, b=1)
    assert cons.holds({0: F(2), 1: F(1)}) is True
    assert cons.holds({0: F(3), 1: F(1)}) is False
    assert cons.holds({0: F(3), 1: F(2)}) is True  # 5 <= 4 + 1


def test_duplicate_index_on_one_side_rejected():
    with pytest.raises(ValueError, match="twice"):
        EmipConstraint(lhs=[(0, 1), (0, 2)], rhs={})


def test_raw_coefficients_become_linear_terms():
    cons = EmipConstraint(lhs={0: F(1, 2)}, rhs={1: -3})
    assert all(isinstance(fn, PwlFunction) for _, fn in cons.lhs + cons.rhs)
    assert cons.lhs[0][1].slopes == (F(1, 2),)
    assert cons.rhs[0][1].slopes == (-3,)


def test_var_index_and_nonlinear_indices():
    fn = PwlFunction(Shape.CONVEX, 0, (1,), (0, 1))
    model = EmipModel(
        (_var("x"), _var("y")),
        (EmipConstraint(lhs={0: fn, 1: 2}, rhs={}, b=3),),
    )
    assert model.var_index("y") == 1
    with pytest.raises(KeyError):
        model.var_index("zz")
    assert model.nonlinear_var_indices() == {0}


def test_objective_validation():
    with pytest.raises(ValueError, match="sense"):
        Objective("maximize", {0: 1})
    obj = Objective("max", {1: F(1, 2), 0: -1})
    assert obj.coeffs == ((0, -1), (1, F(1, 2)))


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def test_validate_shape_sides():
    convex = PwlFunction(Shape.CONVEX, 0, (1,), (0, 1))
    concave = PwlFunction(Shape.CONCAVE, 0, (1,), (1, 0))
    model = EmipModel(
        (_var("x"),),
        (EmipConstraint(lhs={0: concave}, rhs={}),),
    )
    assert any("convex or linear" in p for p in validate(model))
    model = EmipModel(
        (_var("x"),),
        (EmipConstraint(lhs={}, rhs={0: convex}),),
    )
    assert any("concave or linear" in p for p in validate(model))
    # linear terms are fine on either side, whatever their declared shape
    model = EmipModel(
        (_var("x"),),
        (EmipConstraint(lhs={0: -2}, rhs={0: 3}),),
    )
    assert validate(model) == []


def test_validate_transformed_variable_needs_nonnegative_lower():
    convex = PwlFunction(Shape.CONVEX, 0, (1,), (0, 1))
    model = EmipModel(
        (_var("x", lower=-1),),
        (EmipConstraint(lhs={0: convex}, rhs={}),),
    )
    assert any("nonnegative lower" in p for p in validate(model))
    # a linear-only variable may go negative
    model = EmipModel(
        (_var("x", lower=-1),),
        (EmipConstraint(lhs={0: 2}, rhs={}),),
    )
    assert validate(model) == []


def test_validate_misc_problems():
    model = EmipModel(
        (_var("x"), _var("x")),
        (EmipConstraint(lhs={5: 1}, rhs={}),),
        Objective("max", {9: 1}),
    )
    problems = validate(model)
    assert any("duplicate name" in p for p in problems)
    assert any("unknown variable index 5" in p for p in problems)
    assert any("objective: unknown variable index 9" in p for p in problems)
    model = EmipModel((_var("x", lower=4, upper=2),), ())
    assert any("empty bound range" in p for p in validate(model))


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def test_normalize_folds_constants_into_b():
    # f(0) = 2 on the left and g(0) = -1 on the right fold into b:
    # b' = b - f(0) + g(0) = 0 - 2 + (-1) = -3
    model = EmipModel(
        (_var("x"), _var("y")),
        (EmipConstraint(lhs={0: PwlFunction.linear(1, 2)},
                        rhs={1: PwlFunction.linear(1, -1, Shape.CONCAVE)},
                        b=0),),
    )
    norm = normalize(model)
    assert norm.constraints[0].b == -3
    for _, fn in norm.constraints[0].lhs + norm.constraints[0].rhs:
        assert fn.value_at_zero == 0
    assert is_normalized(norm)


def test_normalize_drops_negative_breakpoints():
    fn = PwlFunction(Shape.CONVEX, 7, (-1, 1), (-2, 0, 5))
    model = EmipModel(
        (_var("x"),),
        (EmipConstraint(lhs={0: fn}, rhs={}, b=20),),
    )
    norm = normalize(model)
    (idx, out), = norm.constraints[0].lhs
    assert out.breakpoints == (1,)
    assert out.value_at_zero == 0
    # constant folded: b' = 20 - f(0) = 13
    assert norm.constraints[0].b == 13
    # same feasible set on the nonnegative domain
    for x in range(0, 7):
        assert model.constraints[0].holds({0: F(x)}) == \
            norm.constraints[0].holds({0: F(x)})


def test_normalize_splits_negative_linear_variable():
    model = EmipModel(
        (_var("x", lower=-3, upper=2),),
        (EmipConstraint(lhs={0: 2}, rhs={}, b=3),),
    )
    norm, vmap = normalize_with_map(model)
    names = [v.name for v in norm.variables]
    assert names == ["x__pos", "x__neg"]
    assert norm.variables[0].lower == 0 and norm.variables[0].upper == 2
    assert norm.variables[1].lower == 0 and norm.variables[1].upper == 3
    terms = dict(norm.constraints[0].lhs)
    assert terms[0].slopes == (2,)
    assert terms[1].slopes == (-2,)
    # round trips through the map
    point = {0: F(-2)}
    fwd = vmap.push_forward(point)
    assert fwd == {0: F(0), 1: F(2)}
    assert vmap.pull_back(fwd) == point


def test_normalize_objective_follows_split():
    model = EmipModel(
        (_var("x", lower=-3, upper=2),),
        (EmipConstraint(lhs={0: 1}, rhs={}, b=3),),
        Objective("max", {0: 5}),
    )
    norm = normalize(model)
    assert norm.objective.coeffs == ((0, 5), (1, -5))


def test_normalize_merges_split_terms_without_collision():
    # both a positive and negative contribution of x on the same side
    model = EmipModel(
        (_var("x", lower=-2, upper=2), _var("y", lower=-2, upper=2)),
        (EmipConstraint(lhs={0: 3}, rhs={1: 1}, b=0),),
    )
    norm = normalize(model)
    assert is_normalized(norm)
    for point in iter_grid(model):
        fwd = {0: max(F(0), point[0]), 1: max(F(0), -point[0]),
               2: max(F(0), point[1]), 3: max(F(0), -point[1])}
        assert model.constraints[0].holds(point) == \
            norm.constraints[0].holds(fwd)


def test_normalize_two_nonlinear_terms_one_variable_rejected():
    fn = PwlFunction(Shape.CONVEX, 0, (1,), (0, 1))
    model = EmipModel(
        (_var("x", lower=-1),),  # forces a split; x carries only linear terms
        (EmipConstraint(lhs={0: 2}, rhs={}),
         EmipConstraint(lhs={0: fn}, rhs={})),
    )
    # the transformed appearance forbids the negative lower bound instead
    with pytest.raises(InvalidModelError):
        normalize(model)


def test_normalize_idempotent():
    rng = random.Random(0xE31)
    for _ in range(40):
        model = random_grid_model(rng)
        once = normalize(model)
        assert is_normalized(once)
        assert normalize(once) == once


def test_normalize_preserves_grid_feasibility():
    rng = random.Random(0xE32)
    for _ in range(60):
        model = random_grid_model(rng)
        norm, vmap = normalize_with_map(model)
        for point in iter_grid(model):
            original = all(c.holds(point) for c in model.constraints)
            fwd = vmap.push_forward(point)
            image = all(c.holds(fwd) for c in norm.constraints)
            assert original == image
            if original:
                assert satisfies(norm, fwd)
        assert grid_feasible(model)[0] == grid_feasible(norm)[0]


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_json_round_trip():
    fn = PwlFunction(Shape.CONVEX, F(1, 2), (1,), (0, F(3, 2)))
    model = EmipModel(
        (_var("x"), Variable("c", VarKind.CONTINUOUS, 0, None)),
        (EmipConstraint(lhs={0: fn}, rhs={1: F(1, 3)}, b=F(7, 2)),),
        Objective("min", {0: 1, 1: F(-1, 2)}),
    )
    again = EmipModel.from_json(model.to_json())
    assert again == model


def test_json_round_trip_random():
    rng = random.Random(0xE33)
    for _ in range(30):
        model = random_grid_model(rng, with_objective=rng.random() < 0.5)
        assert EmipModel.from_json(model.to_json()) == model


def test_from_json_errors():
    with pytest.raises(ValueError, match="format"):
        EmipModel.from_json({"format": "nope", "variables": []})
    with pytest.raises(ValueError):
        EmipModel.from_json([1, 2])
    base = {
        "format": "emip-v1",
        "variables": [{"name": "x"}, {"name": "x"}],
        "constraints": [],
    }
    with pytest.raises(ValueError, match="duplicate"):
        EmipModel.from_json(base)
    base = {
        "format": "emip-v1",
        "variables": [{"name": "x"}],
        "constraints": [{"lhs": {"zz": "1"}, "rhs": {}, "b": "0"}],
    }
    with pytest.raises(ValueError, match="unknown variable"):
        EmipModel.from_json(base)
