"""Exact LP feasibility, branch and bound, and threshold optimization."""

import random
from fractions import Fraction

import pytest

from generators import grid_best, grid_feasible, random_grid_model
from pwlmip import _kernel, milp
from pwlmip.emip import VarKind, normalize
from pwlmip.milp.branch_bound import resolve_node_limit
from pwlmip.milp.lp import solve_lp_feasibility
from pwlmip.milp.model import MilpModel, MilpVariable
from pwlmip.reduction import lower

F = Fraction


def _mk(variables, rows):
    return MilpModel(
        tuple(MilpVariable(*v) for v in variables),
        tuple((tuple((i, F(c)) for i, c in coeffs), F(rhs))
              for coeffs, rhs in rows),
    )


# ---------------------------------------------------------------------------
# LP layer
# ---------------------------------------------------------------------------


def test_lp_feasibility_basic():
    rows = [(((0, F(1)),), F(2)), (((0, F(-1)),), F(-1))]  # 1 <= x <= 2
    ok, point, pivots = solve_lp_feasibility(rows, [F(0)], [F(10)])
    assert ok and 1 <= point[0] <= 2
    ok, point, _ = solve_lp_feasibility(
        [(((0, F(-1)),), F(-11))], [F(0)], [F(10)]
    )
    assert not ok


def test_lp_handles_free_variables():
    # x free, x <= -3 and -x <= -(-5) i.e. x >= -5
    rows = [(((0, F(1)),), F(-3)), (((0, F(-1)),), F(5))]
    ok, point, _ = solve_lp_feasibility(rows, [None], [None])
    assert ok and -5 <= point[0] <= -3


def test_lp_negative_rhs_exercises_artificials():
    # x + y >= 4 written as -x - y <= -4, within [0, 3] each
    rows = [(((0, F(-1)), (1, F(-1))), F(-4))]
    ok, point, _ = solve_lp_feasibility(rows, [F(0), F(0)], [F(3), F(3)])
    assert ok and point[0] + point[1] >= 4
    rows = [(((0, F(-1)), (1, F(-1))), F(-7))]
    ok, _, _ = solve_lp_feasibility(rows, [F(0), F(0)], [F(3), F(3)])
    assert not ok


def test_lp_exact_rational_vertex():
    # 3x = 1 has the exact solution 1/3
    rows = [(((0, F(3)),), F(1)), (((0, F(-3)),), F(-1))]
    ok, point, _ = solve_lp_feasibility(rows, [F(0)], [F(1)])
    assert ok and point[0] == F(1, 3)


# ---------------------------------------------------------------------------
# branch and bound
# ---------------------------------------------------------------------------


def test_feasibility_needs_branching():
    # 2x + 3y = 12 over integers in [0, 6]: x=3, y=2 or x=0, y=4
    model = _mk(
        [("x", VarKind.INTEGER, F(0), F(6)), ("y", VarKind.INTEGER, F(0), F(6))],
        [([(0, 2), (1, 3)], 12), ([(0, -2), (1, -3)], -12)],
    )
    result = milp.solve_feasibility(model)
    assert result.feasible
    x, y = result.assignment[0], result.assignment[1]
    assert 2 * x + 3 * y == 12
    assert x.denominator == 1 and y.denominator == 1


def test_parity_infeasibility_detected():
    # 2x + 2y = 7 has no integer solutions though the LP relaxation is fine
    model = _mk(
        [("x", VarKind.INTEGER, F(0), F(6)), ("y", VarKind.INTEGER, F(0), F(6))],
        [([(0, 2), (1, 2)], 7), ([(0, -2), (1, -2)], -7)],
    )
    result = milp.solve_feasibility(model)
    assert not result.feasible
    assert result.status == "infeasible"
    assert result.stats.nodes > 1  # really had to branch


def test_unbounded_integer_rejected():
    model = _mk([("x", VarKind.INTEGER, F(0), None)], [([(0, 1)], 5)])
    with pytest.raises(ValueError, match="finite bounds"):
        milp.solve_feasibility(model)


def test_node_limit_raises_resource_exhausted():
    model = _mk(
        [("x", VarKind.INTEGER, F(0), F(6)), ("y", VarKind.INTEGER, F(0), F(6))],
        [([(0, 2), (1, 2)], 7), ([(0, -2), (1, -2)], -7)],
    )
    with pytest.raises(milp.ResourceExhausted) as exc:
        milp.solve_feasibility(model, node_limit=2)
    assert exc.value.nodes == 2
    assert exc.value.limit == 2


def test_node_limit_environment_variable(monkeypatch):
    monkeypatch.delenv("PWLMIP_NODE_LIMIT", raising=False)
    assert resolve_node_limit() == milp.DEFAULT_NODE_LIMIT
    monkeypatch.setenv("PWLMIP_NODE_LIMIT", "17")
    assert resolve_node_limit() == 17
    assert resolve_node_limit(5) == 5  # explicit argument wins
    monkeypatch.setenv("PWLMIP_NODE_LIMIT", "zero")
    with pytest.raises(ValueError, match="integer"):
        resolve_node_limit()
    monkeypatch.setenv("PWLMIP_NODE_LIMIT", "-3")
    with pytest.raises(ValueError, match="positive"):
        resolve_node_limit()


def test_determinism():
    rng = random.Random(0xB51)
    for _ in range(10):
        model = random_grid_model(rng)
        lowered, _ = lower(normalize(model))
        first = milp.solve_feasibility(lowered)
        second = milp.solve_feasibility(lowered)
        assert first.feasible == second.feasible
        assert first.assignment == second.assignment
        assert first.stats == second.stats


# ---------------------------------------------------------------------------
# threshold optimization
# ---------------------------------------------------------------------------


def test_maximize_knapsack():
    # max x + y subject to x + 2y <= 6, x in [0, 2], y in [0, 6]
    model = _mk(
        [("x", VarKind.INTEGER, F(0), F(2)), ("y", VarKind.INTEGER, F(0), F(6))],
        [([(0, 1), (1, 2)], 6)],
    )
    result = milp.maximize(model, {0: F(1), 1: F(1)}, 0, 8)
    assert result.feasible and result.best == 4
    x, y = result.assignment[0], result.assignment[1]
    assert x + y >= 4 and x + 2 * y <= 6
    # one past the optimum is infeasible: the bracket [T*+1, hi] finds nothing
    past = milp.maximize(model, {0: F(1), 1: F(1)}, 5, 8)
    assert not past.feasible


def test_maximize_empty_bracket():
    model = _mk([("x", VarKind.INTEGER, F(0), F(2))], [([(0, 1)], 2)])
    with pytest.raises(ValueError, match="bracket"):
        milp.maximize(model, {0: F(1)}, 3, 2)


def test_maximize_entire_bracket_feasible():
    model = _mk([("x", VarKind.INTEGER, F(0), F(5))], [([(0, 1)], 5)])
    result = milp.maximize(model, {0: F(1)}, 0, 5)
    assert result.best == 5 and result.assignment[0] == 5


def test_maximize_against_grid_enumeration():
    rng = random.Random(0xB52)
    checked = 0
    while checked < 30:
        model = random_grid_model(rng, with_objective=True)
        truth = grid_best(model)
        norm = normalize(model)
        lowered, _ = lower(norm)
        coeffs = dict(norm.objective.coeffs)
        if norm.objective.sense == "min":
            coeffs = {i: -c for i, c in coeffs.items()}
        from pwlmip.pipeline import objective_bracket

        lo, hi = objective_bracket(norm, coeffs)
        result = milp.maximize(lowered, coeffs, lo, hi)
        if truth is None:
            assert not result.feasible
        else:
            signed = truth if norm.objective.sense == "max" else -truth
            assert result.feasible
            # largest integer threshold below the exact optimum
            import math

            assert result.best == math.floor(signed)
        checked += 1


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def test_kernels_agree():
    available = _kernel.available_kernels()
    rng = random.Random(0xB53)
    models = [random_grid_model(rng) for _ in range(12)]
    runs = {}
    previous = _kernel.active_kernel_name()
    try:
        for name in available:
            _kernel.use(name)
            outcomes = []
            for model in models:
                lowered, _ = lower(normalize(model))
                result = milp.solve_feasibility(lowered)
                outcomes.append((result.feasible, result.assignment,
                                 result.stats.pivots))
            runs[name] = outcomes
    finally:
        _kernel.use(previous)
    baseline = runs[available[0]]
    for name in available[1:]:
        assert runs[name] == baseline  # identical pivot sequences


def test_check_assignment_reports_violations():
    model = _mk([("x", VarKind.INTEGER, F(0), F(2))], [([(0, 1)], 1)])
    assert model.check_assignment({0: F(1)}) == []
    assert any("row" in p for p in model.check_assignment({0: F(2)}))
    assert any("integral" in p or "integer" in p
               for p in model.check_assignment({0: F(1, 2)}))
    assert model.check_assignment({0: F(-1)}) != []
