# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of pure.phase1: identical pivot sequence, faster loop.

Entries stay Python rational objects (Fraction or gmpy2.mpq); the speedup
comes from typed index arithmetic and direct list access in the elimination
loop, not from changing the arithmetic.  Keep this file line-for-line in sync
with pure.py; any behavioural difference is a bug.
"""


def phase1(list tableau, list basis, Py_ssize_t nrows, Py_ssize_t ncols):
    cdef Py_ssize_t pivots = 0
    cdef Py_ssize_t enter, leave, i, j
    cdef list obj = tableau[nrows]
    cdef list prow, row
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
            a = (<list> tableau[i])[enter]
            if a > 0:
                ratio = (<list> tableau[i])[ncols] / a
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
