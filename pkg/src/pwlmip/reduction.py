"""Lowering piecewise-linear constraints to plain mixed-integer linear rows.

Each constraint ``sum f_i(x_i) <= sum g_i(x_i) + b`` of a normalized model is
replaced by ``sum w_i <= sum u_i + b`` plus, per transformed variable,
auxiliary continuous variables and rows that pin w above the convex side and
u below the concave side:

  convex f on x, breakpoints rho_1..rho_L, slopes d_0..d_L:
      z_l >= 0,  z_l >= x - rho_l          (l = 1..L)
      x*d_0 + sum_l z_l*(d_l - d_{l-1}) <= w

  concave g on x:
      y_l >= 0,  y_l >= x - rho_l
      u <= x*d_0 + sum_l y_l*(d_l - d_{l-1})

Because the convex slope steps are positive, any feasible w dominates f(x)
(z_l can always retreat to max(0, x - rho_l)), and symmetrically u is forced
under g(x); plugging in the witness values w = f(x), u = g(x),
z_l = max(0, x - rho_l) embeds every feasible point of the source model.
Integer variables pass through untouched, so the integer dimension is
unchanged.  Rows are scaled to integer coefficients, and auxiliaries get
exact range bounds so the LP relaxation stays tight.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .emip import EmipModel, VarKind, is_normalized, validate
from .milp.model import MilpModel, MilpVariable
from .pwl import PwlFunction
from .rationals import ZERO, clear_denominators


class NotNormalizedError(ValueError):
    """Lowering requires a normalized model (f(0)=0, no negative breakpoints)."""


class WitnessError(ValueError):
    """A lifted assignment failed the exact source-model re-check."""


@dataclass(frozen=True)
class LoweredTerm:
    """Auxiliaries standing in for one transformation f(x_i) or g(x_i)."""

    var: int               # index of x_i (same in source and lowered model)
    bound_var: int         # index of w (convex side) or u (concave side)
    aux_vars: tuple        # indices of z_l / y_l, one per breakpoint
    fn: PwlFunction


@dataclass(frozen=True)
class LoweringMap:
    """Where every source variable and transformation landed."""

    n_original: int
    original_names: tuple
    terms: tuple  # ((constraint_index, side, var_index) -> LoweredTerm) pairs

    def term_index(self):
        return {key: term for key, term in self.terms}


def lower(model: EmipModel):
    """Lower a normalized model; returns (MilpModel, LoweringMap)."""
    problems = validate(model)
    if problems:
        raise ValueError("; ".join(problems))
    if not is_normalized(model):
        raise NotNormalizedError(
            "model must be normalized before lowering (call normalize first)"
        )

    variables = [
        MilpVariable(v.name, v.kind, v.lower, v.upper) for v in model.variables
    ]
    rows = []
    term_map = []

    for j, cons in enumerate(model.constraints):
        budget = {}

        def bump(idx, delta, budget=budget):
            budget[idx] = budget.get(idx, ZERO) + delta

        for side_name, side, sign in (("lhs", cons.lhs, 1), ("rhs", cons.rhs, -1)):
            for idx, fn in side:
                if fn.is_linear:
                    bump(idx, sign * fn.slopes[0])
                    continue
                src = model.variables[idx]
                fmin, fmax = fn.range_on(src.lower, src.upper)
                prefix = "w" if sign > 0 else "u"
                bound_var = len(variables)
                variables.append(
                    MilpVariable(
                        "%s_c%d_%s" % (prefix, j, src.name),
                        VarKind.CONTINUOUS,
                        fmin,
                        fmax,
                    )
                )
                aux_vars = []
                aux_prefix = "z" if sign > 0 else "y"
                for l, rho in enumerate(fn.breakpoints, start=1):
                    aux = len(variables)
                    aux_upper = (
                        None
                        if src.upper is None
                        else max(ZERO, src.upper - rho)
                    )
                    variables.append(
                        MilpVariable(
                            "%s_c%d_%s_%d" % (aux_prefix, j, src.name, l),
                            VarKind.CONTINUOUS,
                            ZERO,
                            aux_upper,
                        )
                    )
                    aux_vars.append(aux)
                    # z_l >= 0 and z_l >= x - rho_l, written as <=-rows
                    rows.append((((aux, Fraction(-1)),), ZERO))
                    rows.append(
                        (((idx, Fraction(1)), (aux, Fraction(-1))), Fraction(rho))
                    )
                link = [(idx, sign * fn.slopes[0])]
                for aux, lo, hi in zip(aux_vars, fn.slopes, fn.slopes[1:]):
                    link.append((aux, sign * (hi - lo)))
                link.append((bound_var, Fraction(-sign)))
                rows.append((tuple(link), ZERO))
                bump(bound_var, Fraction(sign))
                term_map.append(
                    (
                        (j, side_name, idx),
                        LoweredTerm(idx, bound_var, tuple(aux_vars), fn),
                    )
                )
        rows.append(
            (tuple(sorted((i, c) for i, c in budget.items() if c != 0)), cons.b)
        )

    cleared = [clear_denominators(coeffs, rhs) for coeffs, rhs in rows]
    milp = MilpModel(
        tuple(variables), tuple((tuple(c), Fraction(r)) for c, r in cleared)
    )
    lmap = LoweringMap(
        n_original=len(model.variables),
        original_names=tuple(v.name for v in model.variables),
        terms=tuple(term_map),
    )
    return milp, lmap


def witness_embed(model: EmipModel, lmap: LoweringMap, assignment):
    """Extend a source-model assignment to the lowered variables.

    Sets w = f(x), u = g(x), and every auxiliary to max(0, x - rho); the
    result satisfies the lowered model whenever the source point satisfies
    the source model.
    """
    full = {i: Fraction(assignment[i]) for i in range(lmap.n_original)}
    for (j, side, idx), term in lmap.terms:
        x = full[idx]
        full[term.bound_var] = term.fn.eval(x)
        for aux, rho in zip(term.aux_vars, term.fn.breakpoints):
            full[aux] = max(ZERO, x - rho)
    return full


def witness_lift(model: EmipModel, lmap: LoweringMap, assignment):
    """Restrict a lowered-model point to the source variables and verify.

    Raises WitnessError if the restriction violates any source constraint;
    a correct lowering never triggers this.
    """
    point = {i: Fraction(assignment[i]) for i in range(lmap.n_original)}
    for j, cons in enumerate(model.constraints):
        if not cons.holds(point):
            raise WitnessError(
                "lifted point violates source constraint %d" % j
            )
    for i, v in enumerate(model.variables):
        x = point[i]
        if x < v.lower or (v.upper is not None and x > v.upper):
            raise WitnessError("lifted point violates bounds of %r" % v.name)
        if v.kind is VarKind.INTEGER and x.denominator != 1:
            raise WitnessError("lifted point not integral on %r" % v.name)
    return point
