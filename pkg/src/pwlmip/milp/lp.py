"""Exact rational LP feasibility via phase-1 simplex.

The caller hands over <=-rows and per-variable bounds; this module shifts or
splits variables to the nonnegative orthant, adds slacks and artificials, and
runs the Bland-rule pivot kernel.  Feasibility holds iff the phase-1 optimum
is zero, in which case the found vertex is mapped back to original variables.
"""

from __future__ import annotations

from fractions import Fraction

from .. import _kernel
from ..rationals import ZERO, from_backend, to_backend


def solve_lp_feasibility(rows, lowers, uppers):
    """Find any exact point satisfying all rows and bounds.

    rows: iterable of (coeffs, rhs) with coeffs (index, Fraction) pairs.
    lowers/uppers: per-variable bounds, each entry a Fraction or None.
    Returns (feasible, point, pivots); point is a list of Fractions.
    """
    n = len(lowers)

    # Column layout: one shifted column per bounded-below variable, a
    # positive/negative pair per free variable.
    col_of = []  # per variable: ("shift", col) or ("split", pos_col, neg_col)
    ncols = 0
    for i in range(n):
        if lowers[i] is not None:
            col_of.append(("shift", ncols))
            ncols += 1
        else:
            col_of.append(("split", ncols, ncols + 1))
            ncols += 2

    dense_rows = []  # (list of ncols coefficients, rhs)

    def add_row(coeffs, rhs):
        dense = [ZERO] * ncols
        for i, c in coeffs:
            if not c:
                continue
            spec = col_of[i]
            if spec[0] == "shift":
                dense[spec[1]] += c
                rhs -= c * lowers[i]
            else:
                dense[spec[1]] += c
                dense[spec[2]] -= c
        dense_rows.append((dense, rhs))

    for coeffs, rhs in rows:
        add_row(coeffs, Fraction(rhs))
    for i in range(n):
        if uppers[i] is not None:
            add_row(((i, Fraction(1)),), Fraction(uppers[i]))

    m = len(dense_rows)
    # Tableau columns: structural | slacks | artificials | rhs.
    n_art = sum(1 for _, rhs in dense_rows if rhs < 0)
    width = ncols + m + n_art
    tableau = []
    basis = []
    art_rows = []
    art_next = ncols + m
    for k, (dense, rhs) in enumerate(dense_rows):
        if rhs < 0:
            row = [-c for c in dense] + [ZERO] * (m + n_art + 1)
            row[width] = -rhs
            row[ncols + k] = Fraction(-1)
            row[art_next] = Fraction(1)
            basis.append(art_next)
            art_rows.append(k)
            art_next += 1
        else:
            row = list(dense) + [ZERO] * (m + n_art + 1)
            row[width] = rhs
            row[ncols + k] = Fraction(1)
            basis.append(ncols + k)
        tableau.append(row)

    if not art_rows:
        # The all-zeros point (all structural columns at 0) is feasible.
        point = _point_from_columns(col_of, lowers, {}, n)
        return True, point, 0

    # Phase-1 objective: minimize the artificial sum.  Price out the basic
    # artificials so the objective row starts consistent with the basis.
    obj = [ZERO] * (width + 1)
    for k in art_rows:
        row = tableau[k]
        for j in range(width + 1):
            obj[j] -= row[j]
    for k in art_rows:
        obj[basis[k]] = ZERO
    tableau.append(obj)

    backend = [[to_backend(x) for x in row] for row in tableau]
    pivots = _kernel.phase1(backend, basis, m, width)

    opt = -backend[m][width]
    if opt != 0:
        return False, None, pivots

    values = {}
    for k in range(m):
        if basis[k] < ncols:
            values[basis[k]] = from_backend(backend[k][width])
    point = _point_from_columns(col_of, lowers, values, n)
    return True, point, pivots


def _point_from_columns(col_of, lowers, values, n):
    point = []
    for i in range(n):
        spec = col_of[i]
        if spec[0] == "shift":
            point.append(values.get(spec[1], ZERO) + lowers[i])
        else:
            point.append(values.get(spec[1], ZERO) - values.get(spec[2], ZERO))
    return point
