"""End-to-end solving of piecewise-linear models.

Chains normalize -> lower -> branch and bound -> witness lift, keeping the
plumbing (variable maps, witness verification) in one place for the covering,
approximation, and election layers as well as the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import milp
from .emip import EmipModel, normalize_with_map
from .milp.model import SolveStats
from .reduction import lower, witness_lift
from .rationals import ZERO


@dataclass
class EmipSolveResult:
    feasible: bool
    assignment: dict | None          # original variable index -> Fraction
    stats: SolveStats = field(default_factory=SolveStats)
    best: int | None = None          # threshold optimum when an objective ran


def solve_emip(model: EmipModel, node_limit=None) -> EmipSolveResult:
    """Feasibility for an extended model; the witness is exact and verified."""
    normalized, vmap = normalize_with_map(model)
    lowered, lmap = lower(normalized)
    result = milp.solve_feasibility(lowered, node_limit)
    if not result.feasible:
        return EmipSolveResult(False, None, result.stats)
    lifted = witness_lift(normalized, lmap, result.assignment)
    original = vmap.pull_back(lifted)
    return EmipSolveResult(True, original, result.stats)


def maximize_emip(model: EmipModel, t_lo=None, t_hi=None, node_limit=None) -> EmipSolveResult:
    """Threshold search on the model's linear objective.

    Finds the largest integer T with {model, objective >= T} feasible (for a
    "min" objective: the smallest T with objective <= T, via negation).  The
    bracket [t_lo, t_hi] must contain the optimum; when omitted it is derived
    from the variable bounds, which therefore must be finite on every
    objective variable.
    """
    if model.objective is None:
        raise ValueError("model has no objective")
    normalized, vmap = normalize_with_map(model)
    lowered, lmap = lower(normalized)
    sense = normalized.objective.sense
    coeffs = dict(normalized.objective.coeffs)
    if sense == "min":
        coeffs = {i: -c for i, c in coeffs.items()}

    if t_lo is None or t_hi is None:
        lo, hi = objective_bracket(normalized, coeffs)
        t_lo = lo if t_lo is None else t_lo
        t_hi = hi if t_hi is None else t_hi

    result = milp.maximize(lowered, coeffs, t_lo, t_hi, node_limit)
    if not result.feasible:
        return EmipSolveResult(False, None, result.stats)
    lifted = witness_lift(normalized, lmap, result.assignment)
    original = vmap.pull_back(lifted)
    best = result.best if sense == "max" else -result.best
    return EmipSolveResult(True, original, result.stats, best=best)


def objective_bracket(model: EmipModel, coeffs):
    """A sound threshold bracket from variable bounds (must be finite)."""
    lo = ZERO
    hi = ZERO
    for i, c in coeffs.items():
        if c == 0:
            continue
        v = model.variables[i]
        if v.upper is None:
            raise ValueError(
                "objective variable %r needs a finite upper bound to derive a "
                "threshold bracket" % v.name
            )
        ends = (c * v.lower, c * v.upper)
        lo += min(ends)
        hi += max(ends)
    return math.floor(lo), math.ceil(hi)


def minimize_budget(model: EmipModel, constraint: int, node_limit=None):
    """Minimize the left-hand side of a budget-style constraint.

    The constraint's left side must consist of convex terms over variables
    with lower bound 0; its right side must be empty.  In the lowered model
    each non-linear term is represented by its bounding variable w (pushed
    down to the exact function value at any optimum) and each linear term by
    the variable itself, so the total is a linear expression and threshold
    search applies.  Returns ``(assignment, best, stats)`` with the
    assignment in the original model's indices and ``best`` the exact
    minimum, or ``(None, None, stats)`` when the model is infeasible.
    """
    normalized, vmap = normalize_with_map(model)
    lowered, lmap = lower(normalized)
    term_index = lmap.term_index()
    coeffs = {}
    for idx, fn in normalized.constraints[constraint].lhs:
        if fn.is_linear:
            coeffs[idx] = coeffs.get(idx, ZERO) - fn.slopes[0]
        else:
            term = term_index[(constraint, "lhs", idx)]
            coeffs[term.bound_var] = coeffs.get(term.bound_var, ZERO) - 1
    budget = normalized.constraints[constraint].b
    result = milp.maximize(lowered, coeffs, -budget, 0, node_limit)
    if not result.feasible:
        return None, None, result.stats
    lifted = witness_lift(normalized, lmap, result.assignment)
    return vmap.pull_back(lifted), -result.best, result.stats
