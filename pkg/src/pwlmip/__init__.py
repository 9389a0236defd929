"""pwlmip: exact MIP solving with piecewise-linear variable transformations.

The pipeline lowers constraints built from convex/concave piecewise-linear
transformations to plain mixed-integer linear rows, solves them with an exact
rational branch-and-bound over a Bland-rule simplex, and layers multiset
covering, an epsilon-almost-cover approximation scheme, and election
manipulation solvers on top.
"""

from .emip import EmipConstraint, EmipModel, Objective, Variable, VarKind, normalize, validate
from .pwl import PwlFunction, Shape
from .pipeline import maximize_emip, solve_emip

__version__ = "0.1.0"

__all__ = [
    "EmipConstraint",
    "EmipModel",
    "Objective",
    "PwlFunction",
    "Shape",
    "VarKind",
    "Variable",
    "maximize_emip",
    "normalize",
    "solve_emip",
    "validate",
    "__version__",
]
