"""Branch-and-bound feasibility search and threshold-based optimization.

Feasibility: depth-first branch and bound on the LP relaxation.  At each node
the exact LP either proves the box empty or returns a vertex; a fractional
integer variable (the most fractional one, ties to the lowest index) splits
the box into ``x <= floor(v)`` (explored first) and ``x >= floor(v)+1``.
Integer variables need finite bounds, so the tree is finite; Bland's rule
makes every answer deterministic.

Optimization: ``maximize`` binary-searches the largest integer T for which
the model stays feasible with the extra row ``objective >= T``, as in the
threshold trick that turns one optimization into about log(range) feasibility
solves.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

from ..emip import VarKind
from ..rationals import ZERO
from .lp import solve_lp_feasibility
from .model import (
    MilpModel,
    ResourceExhausted,
    SolveResult,
    SolveStats,
    SolverInternalError,
)

DEFAULT_NODE_LIMIT = 10**6
_ENV_NODE_LIMIT = "PWLMIP_NODE_LIMIT"


def resolve_node_limit(node_limit=None) -> int:
    if node_limit is not None:
        return int(node_limit)
    env = os.environ.get(_ENV_NODE_LIMIT)
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(
                "%s must be an integer, got %r" % (_ENV_NODE_LIMIT, env)
            ) from exc
        if value <= 0:
            raise ValueError("%s must be positive" % _ENV_NODE_LIMIT)
        return value
    return DEFAULT_NODE_LIMIT


def solve_feasibility(model: MilpModel, node_limit=None) -> SolveResult:
    """Exact feasibility: a witness assignment or a proof of emptiness."""
    limit = resolve_node_limit(node_limit)
    int_idx = model.integer_indices()
    for i in int_idx:
        v = model.variables[i]
        if v.lower is None or v.upper is None:
            raise ValueError(
                "integer variable %r needs finite bounds for the search to "
                "terminate" % v.name
            )

    stats = SolveStats()
    lowers = tuple(v.lower for v in model.variables)
    uppers = tuple(v.upper for v in model.variables)
    stack = [(lowers, uppers)]
    while stack:
        if stats.nodes >= limit:
            raise ResourceExhausted(stats.nodes, limit)
        stats.nodes += 1
        lo, up = stack.pop()
        if any(
            l is not None and u is not None and l > u for l, u in zip(lo, up)
        ):
            continue
        feasible, point, pivots = solve_lp_feasibility(model.rows, lo, up)
        stats.lp_calls += 1
        stats.pivots += pivots
        if not feasible:
            continue

        branch_var = -1
        branch_score = ZERO
        for i in int_idx:
            v = point[i]
            frac = v - math.floor(v)
            if frac == 0:
                continue
            score = min(frac, 1 - frac)
            if score > branch_score:
                branch_score = score
                branch_var = i
        if branch_var < 0:
            assignment = {i: point[i] for i in range(model.n_vars)}
            problems = model.check_assignment(assignment)
            if problems:
                raise SolverInternalError(
                    "feasible answer failed exact re-check: %s" % "; ".join(problems)
                )
            return SolveResult(True, assignment, stats)

        v = point[branch_var]
        fl = Fraction(math.floor(v))
        left_up = list(up)
        left_up[branch_var] = (
            fl if up[branch_var] is None else min(up[branch_var], fl)
        )
        right_lo = list(lo)
        right_lo[branch_var] = (
            fl + 1 if lo[branch_var] is None else max(lo[branch_var], fl + 1)
        )
        stack.append((tuple(right_lo), up))
        stack.append((lo, tuple(left_up)))
    return SolveResult(False, None, stats)


@dataclass
class MaximizeResult:
    feasible: bool
    best: int | None
    assignment: dict | None
    stats: SolveStats = field(default_factory=SolveStats)


def maximize(model: MilpModel, coeffs, t_lo, t_hi, node_limit=None) -> MaximizeResult:
    """Largest integer T in [t_lo, t_hi] with {model, sum(c*x) >= T} feasible.

    ``coeffs`` maps variable index to an exact coefficient.  The bracket must
    contain the optimum for the answer to be the true maximum; if the model is
    infeasible even at ceil(t_lo) the result reports infeasible.  Each of the
    ~log2(range) inner solves gets its own node budget.
    """
    if isinstance(coeffs, dict):
        coeffs = sorted(coeffs.items())
    coeffs = tuple((int(i), Fraction(c)) for i, c in coeffs)
    lo = math.ceil(Fraction(t_lo))
    hi = math.floor(Fraction(t_hi))
    if lo > hi:
        raise ValueError("empty threshold bracket [%s, %s]" % (t_lo, t_hi))

    stats = SolveStats()

    def solve_at(t):
        row = (tuple((i, -c) for i, c in coeffs), Fraction(-t))
        sub = MilpModel(model.variables, model.rows + (row,))
        result = solve_feasibility(sub, node_limit)
        stats.absorb(result.stats)
        return result

    base = solve_at(lo)
    if not base.feasible:
        return MaximizeResult(False, None, None, stats)
    best_assignment = base.assignment
    while lo < hi:
        mid = (lo + hi + 1) // 2
        step = solve_at(mid)
        if step.feasible:
            lo = mid
            best_assignment = step.assignment
        else:
            hi = mid - 1
    return MaximizeResult(True, lo, best_assignment, stats)
