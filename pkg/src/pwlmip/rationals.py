"""Exact rational scalars: parsing, formatting, and backend selection.

Every number in this package is an exact rational.  The public scalar type is
:class:`fractions.Fraction`; inside the solver the arithmetic-heavy tableau
work optionally runs on ``gmpy2.mpq`` (exactly the same semantics, several
times faster).  Set ``PWLMIP_PURE_FRACTIONS=1`` to force Fraction everywhere.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    mpq = None

ZERO = Fraction(0)
ONE = Fraction(1)

_PURE = os.environ.get("PWLMIP_PURE_FRACTIONS") == "1"


def scalar_backend_name():
    """Name of the rational type used inside the solver tableau."""
    return "fraction" if (mpq is None or _PURE) else "gmpy2.mpq"


def to_backend(value):
    """Convert a Fraction to the solver-internal rational type."""
    if mpq is None or _PURE:
        return value
    return mpq(value.numerator, value.denominator)


def from_backend(value) -> Fraction:
    """Convert a solver-internal rational back to a Fraction.

    The numerator/denominator are forced to built-in ints: a Fraction holding
    gmpy2 integers would silently bounce mixed arithmetic back into gmpy2.
    """
    if isinstance(value, Fraction):
        return value
    return Fraction(int(value.numerator), int(value.denominator))


def parse_rational(value) -> Fraction:
    """Parse a rational from JSON-ish input.

    Accepts ints, "p/q" strings, and decimal strings ("-3", "2.5").  Floats
    are rejected unless they are integral, because a float literal in an
    input file almost always means an unintended rounding step.
    """
    if isinstance(value, bool):
        raise ValueError("expected a rational, got a bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if value.is_integer():
            return Fraction(int(value))
        raise ValueError(
            "refusing float %r: write rationals as strings like \"1/3\" or \"0.5\""
            % value
        )
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError("cannot parse rational from %r" % value) from exc
    raise ValueError("cannot parse rational from %r" % (value,))


def format_rational(q: Fraction) -> str:
    """Format exactly; int-valued rationals print without a denominator."""
    q = Fraction(q)
    return str(q)


def lcm_of_denominators(values) -> int:
    """LCM of the denominators of an iterable of rationals (>= 1)."""
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def clear_denominators(coeffs, rhs):
    """Scale a row ``sum(c*x) <= rhs`` by the LCM of all denominators.

    Returns (int_coeffs, int_rhs).  ``coeffs`` is a list of (index, Fraction)
    pairs; the scaled row has the same solution set.
    """
    scale = lcm_of_denominators([c for _, c in coeffs] + [rhs])
    out = [(i, int(c * scale)) for i, c in coeffs]
    return out, int(Fraction(rhs) * scale)
