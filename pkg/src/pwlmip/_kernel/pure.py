"""Pure-Python phase-1 simplex pivot loop (reference kernel).

The tableau is a list of ``nrows + 1`` lists of length ``ncols + 1``: rows
0..nrows-1 are constraint rows, row nrows is the priced-out objective row, and
column ncols holds the right-hand side.  Entries are exact rationals
(Fraction or gmpy2.mpq).  ``basis[i]`` is the column currently basic in row i.

Pivot selection is Bland's rule: the entering column is the lowest index with
a negative objective entry; the leaving row minimizes rhs/a over positive
pivot candidates, ties broken by the lowest basic variable index.  Bland's
rule guarantees termination, and because the choice is deterministic the
compiled twin in ``_speedups.pyx`` produces bit-identical results.
"""


def phase1(tableau, basis, nrows, ncols):
    pivots = 0
    obj = tableau[nrows]
    while True:
        enter = -1
        for j in range(ncols):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            return pivots

        leave = -1
        best = None
        for i in range(nrows):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][ncols] / a
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            raise ArithmeticError(
                "phase-1 objective unbounded below: malformed tableau"
            )

        prow = tableau[leave]
        p = prow[enter]
        if p != 1:
            for j in range(ncols + 1):
                if prow[j]:
                    prow[j] = prow[j] / p
        for i in range(nrows + 1):
            if i == leave:
                continue
            row = tableau[i]
            f = row[enter]
            if f:
                for j in range(ncols + 1):
                    if prow[j]:
                        row[j] = row[j] - f * prow[j]
        basis[leave] = enter
        pivots += 1
