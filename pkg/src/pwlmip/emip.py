"""Mixed-integer programs extended with piecewise-linear transformations.

A model holds variables (integer or continuous, with rational bounds) and
constraints of the form

    sum_i f_i(x_i)  <=  sum_i g_i(x_i) + b

where every left-hand f is convex or linear and every right-hand g is concave
or linear.  ``normalize`` brings a model into the canonical form the lowering
step expects: every transformation has f(0) = 0 and no breakpoints below 0,
constants are folded into b, and variables that appear only linearly but may
go negative are split as x = x_pos - x_neg.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction

from .pwl import PwlFunction, Shape
from .rationals import ZERO, format_rational, parse_rational

FORMAT_NAME = "emip-v1"


class VarKind(enum.Enum):
    INTEGER = "integer"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VarKind = VarKind.INTEGER
    lower: Fraction = ZERO
    upper: Fraction | None = None

    def __post_init__(self):
        if not self.name or not isinstance(self.name, str):
            raise ValueError("variable needs a nonempty string name")
        object.__setattr__(self, "lower", Fraction(self.lower))
        if self.upper is not None:
            object.__setattr__(self, "upper", Fraction(self.upper))


def _as_terms(terms):
    """Normalize a {index: function-or-coefficient} mapping into sorted pairs."""
    if isinstance(terms, dict):
        items = terms.items()
    else:
        items = list(terms)
    out = []
    seen = set()
    for idx, fn in sorted(items):
        if idx in seen:
            raise ValueError("variable %d appears twice on one side" % idx)
        seen.add(idx)
        if not isinstance(fn, PwlFunction):
            fn = PwlFunction.linear(Fraction(fn))
        out.append((idx, fn))
    return tuple(out)


@dataclass(frozen=True)
class EmipConstraint:
    """sum of lhs terms <= sum of rhs terms + b."""

    lhs: tuple
    rhs: tuple
    b: Fraction = ZERO

    def __post_init__(self):
        object.__setattr__(self, "lhs", _as_terms(self.lhs))
        object.__setattr__(self, "rhs", _as_terms(self.rhs))
        object.__setattr__(self, "b", Fraction(self.b))

    def holds(self, assignment) -> bool:
        """Exact check of the constraint at a full assignment (index -> value)."""
        lhs = sum((fn.eval(assignment[i]) for i, fn in self.lhs), start=ZERO)
        rhs = sum((fn.eval(assignment[i]) for i, fn in self.rhs), start=ZERO)
        return lhs <= rhs + self.b


@dataclass(frozen=True)
class Objective:
    sense: str  # "max" or "min"
    coeffs: tuple  # sorted (index, Fraction) pairs

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError("objective sense must be 'max' or 'min'")
        items = self.coeffs.items() if isinstance(self.coeffs, dict) else self.coeffs
        object.__setattr__(
            self, "coeffs", tuple(sorted((i, Fraction(c)) for i, c in items))
        )


@dataclass(frozen=True)
class EmipModel:
    variables: tuple
    constraints: tuple
    objective: Objective | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def var_index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(name)

    def nonlinear_var_indices(self):
        """Indices of variables carrying a transformation with >= 2 pieces."""
        out = set()
        for cons in self.constraints:
            for side in (cons.lhs, cons.rhs):
                for idx, fn in side:
                    if not fn.is_linear:
                        out.add(idx)
        return out

    # -- serialization -----------------------------------------------------

    def to_json(self):
        variables = [
            {
                "name": v.name,
                "kind": v.kind.value,
                "lower": format_rational(v.lower),
                "upper": None if v.upper is None else format_rational(v.upper),
            }
            for v in self.variables
        ]
        constraints = []
        for cons in self.constraints:
            constraints.append(
                {
                    "lhs": {
                        self.variables[i].name: _term_to_json(fn)
                        for i, fn in cons.lhs
                    },
                    "rhs": {
                        self.variables[i].name: _term_to_json(fn)
                        for i, fn in cons.rhs
                    },
                    "b": format_rational(cons.b),
                }
            )
        obj = None
        if self.objective is not None:
            obj = {
                "sense": self.objective.sense,
                "coeffs": {
                    self.variables[i].name: format_rational(c)
                    for i, c in self.objective.coeffs
                },
            }
        return {
            "format": FORMAT_NAME,
            "variables": variables,
            "constraints": constraints,
            "objective": obj,
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise ValueError("model must be a JSON object")
        fmt = obj.get("format")
        if fmt != FORMAT_NAME:
            raise ValueError("unsupported model format %r (expected %r)" % (fmt, FORMAT_NAME))
        variables = []
        for v in obj.get("variables", ()):
            variables.append(
                Variable(
                    name=v["name"],
                    kind=VarKind(v.get("kind", "integer")),
                    lower=parse_rational(v.get("lower", 0)),
                    upper=None if v.get("upper") is None else parse_rational(v["upper"]),
                )
            )
        index = {v.name: i for i, v in enumerate(variables)}
        if len(index) != len(variables):
            raise ValueError("duplicate variable names")

        def parse_side(side_obj):
            terms = {}
            for name, spec in (side_obj or {}).items():
                if name not in index:
                    raise ValueError("constraint references unknown variable %r" % name)
                if isinstance(spec, dict):
                    terms[index[name]] = PwlFunction.from_json(spec)
                else:
                    terms[index[name]] = PwlFunction.linear(parse_rational(spec))
            return terms

        constraints = []
        for c in obj.get("constraints", ()):
            constraints.append(
                EmipConstraint(
                    lhs=parse_side(c.get("lhs")),
                    rhs=parse_side(c.get("rhs")),
                    b=parse_rational(c.get("b", 0)),
                )
            )
        objective = None
        if obj.get("objective") is not None:
            o = obj["objective"]
            objective = Objective(
                sense=o["sense"],
                coeffs={
                    index[name]: parse_rational(c)
                    for name, c in (o.get("coeffs") or {}).items()
                },
            )
        return cls(tuple(variables), tuple(constraints), objective)


def _term_to_json(fn: PwlFunction):
    if fn.is_linear and fn.value_at_zero == 0:
        return format_rational(fn.slopes[0])
    return fn.to_json()


# -- validation -------------------------------------------------------------


def validate(model: EmipModel):
    """Structural checks; returns a list of human-readable violations."""
    problems = []
    names = set()
    for i, v in enumerate(model.variables):
        if v.name in names:
            problems.append("variable %d: duplicate name %r" % (i, v.name))
        names.add(v.name)
        if v.upper is not None and v.upper < v.lower:
            problems.append(
                "variable %r: empty bound range [%s, %s]"
                % (v.name, v.lower, v.upper)
            )
    n = len(model.variables)
    transformed = model.nonlinear_var_indices()
    for idx in sorted(transformed):
        if 0 <= idx < n and model.variables[idx].lower < 0:
            problems.append(
                "variable %r: transformed variables need a nonnegative lower "
                "bound (canonical form)" % model.variables[idx].name
            )
    for j, cons in enumerate(model.constraints):
        for idx, fn in cons.lhs:
            if not (0 <= idx < n):
                problems.append("constraint %d: unknown variable index %d" % (j, idx))
            elif not fn.is_linear and fn.shape is not Shape.CONVEX:
                problems.append(
                    "constraint %d: left-hand transformation on %r must be "
                    "convex or linear" % (j, model.variables[idx].name)
                )
        for idx, fn in cons.rhs:
            if not (0 <= idx < n):
                problems.append("constraint %d: unknown variable index %d" % (j, idx))
            elif not fn.is_linear and fn.shape is not Shape.CONCAVE:
                problems.append(
                    "constraint %d: right-hand transformation on %r must be "
                    "concave or linear" % (j, model.variables[idx].name)
                )
    if model.objective is not None:
        for idx, _ in model.objective.coeffs:
            if not (0 <= idx < n):
                problems.append("objective: unknown variable index %d" % idx)
    return problems


class InvalidModelError(ValueError):
    """Raised when an operation receives a structurally invalid model."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _require_valid(model: EmipModel):
    problems = validate(model)
    if problems:
        raise InvalidModelError(problems)


# -- normalization -----------------------------------------------------------


@dataclass(frozen=True)
class VarMap:
    """How original variables map into a normalized model.

    ``entries[i]`` is either ("same", j) or ("split", j_pos, j_neg) with
    x_i = x[j_pos] - x[j_neg].
    """

    entries: tuple

    def pull_back(self, assignment):
        """Map a normalized-model assignment to original variable values."""
        out = {}
        for i, entry in enumerate(self.entries):
            if entry[0] == "same":
                out[i] = assignment[entry[1]]
            else:
                out[i] = assignment[entry[1]] - assignment[entry[2]]
        return out

    def push_forward(self, assignment):
        """Map original variable values to a normalized-model assignment."""
        out = {}
        for i, entry in enumerate(self.entries):
            x = Fraction(assignment[i])
            if entry[0] == "same":
                out[entry[1]] = x
            else:
                out[entry[1]] = max(ZERO, x)
                out[entry[2]] = max(ZERO, -x)
        return out


def normalize(model: EmipModel) -> EmipModel:
    """Canonical form: f(0)=0, no negative breakpoints, constants in b."""
    return normalize_with_map(model)[0]


def normalize_with_map(model: EmipModel):
    _require_valid(model)
    transformed = model.nonlinear_var_indices()

    variables = []
    entries = []
    split_bounds = {}
    for i, v in enumerate(model.variables):
        if v.lower < 0 and i not in transformed:
            pos_lower = max(ZERO, v.lower)
            pos_upper = None if v.upper is None else max(ZERO, v.upper)
            neg_lower = ZERO if v.upper is None else max(ZERO, -v.upper)
            neg_upper = max(ZERO, -v.lower)
            j_pos = len(variables)
            variables.append(replace(v, name=v.name + "__pos", lower=pos_lower, upper=pos_upper))
            j_neg = len(variables)
            variables.append(replace(v, name=v.name + "__neg", lower=neg_lower, upper=neg_upper))
            entries.append(("split", j_pos, j_neg))
            split_bounds[i] = (j_pos, j_neg)
        else:
            entries.append(("same", len(variables)))
            variables.append(v)

    constraints = []
    for cons in model.constraints:
        b = cons.b
        new_lhs = {}
        new_rhs = {}
        for side, sign, bucket in ((cons.lhs, -1, new_lhs), (cons.rhs, +1, new_rhs)):
            for idx, fn in side:
                fn = fn.drop_negative_breakpoints()
                b += sign * fn.eval(0)
                fn = fn.with_value_at_zero(ZERO)
                if fn.is_linear and fn.slopes[0] == 0:
                    continue
                entry = entries[idx]
                if entry[0] == "same":
                    _merge_term(bucket, entry[1], fn)
                else:
                    slope = fn.slopes[0]
                    _merge_term(bucket, entry[1], PwlFunction.linear(slope))
                    _merge_term(bucket, entry[2], PwlFunction.linear(-slope))
        constraints.append(EmipConstraint(lhs=new_lhs, rhs=new_rhs, b=b))

    objective = None
    if model.objective is not None:
        coeffs = {}
        for idx, c in model.objective.coeffs:
            entry = entries[idx]
            if entry[0] == "same":
                coeffs[entry[1]] = coeffs.get(entry[1], ZERO) + c
            else:
                coeffs[entry[1]] = coeffs.get(entry[1], ZERO) + c
                coeffs[entry[2]] = coeffs.get(entry[2], ZERO) - c
        objective = Objective(model.objective.sense, coeffs)

    normalized = EmipModel(tuple(variables), tuple(constraints), objective)
    return normalized, VarMap(tuple(entries))


def _merge_term(bucket, idx, fn):
    """Sum a new term into a side (two linear terms on one variable can meet)."""
    if idx not in bucket:
        bucket[idx] = fn
        return
    old = bucket[idx]
    if not (old.is_linear and fn.is_linear):
        raise InvalidModelError(
            ["variable index %d has two non-linear terms on one side" % idx]
        )
    merged = old.slopes[0] + fn.slopes[0]
    if merged == 0:
        del bucket[idx]
    else:
        bucket[idx] = PwlFunction.linear(merged)


def is_normalized(model: EmipModel) -> bool:
    for cons in model.constraints:
        for side in (cons.lhs, cons.rhs):
            for _, fn in side:
                if fn.value_at_zero != 0:
                    return False
                if fn.breakpoints and fn.breakpoints[0] < 0:
                    return False
    return True
