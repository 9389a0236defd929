"""Piecewise-linear convex/concave functions over exact rationals.

A function is stored by its breakpoints and per-piece slopes.  With
breakpoints rho_1 < ... < rho_L the domain splits into the L+1 pieces
(-inf, rho_1], (rho_1, rho_2], ..., (rho_L, +inf); slope ``slopes[k]``
applies on piece k.  Convexity means strictly increasing slopes (after
merging equal-slope neighbours), concavity strictly decreasing; a single
piece is linear and counts as either.

Evaluation uses the closed form

    f(x) = f(0) + x*slopes[0] + sum_k max(0, x - rho_k) * (slopes[k] - slopes[k-1])

with a re-anchoring term ``-max(0, -rho_k)*(slopes[k]-slopes[k-1])`` so that
f(0) equals ``value_at_zero`` even when breakpoints are negative; for the
nonnegative-breakpoint functions produced by normalization the two forms are
identical.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .rationals import ZERO, format_rational, parse_rational


class Shape(enum.Enum):
    CONVEX = "convex"
    CONCAVE = "concave"


def _as_fraction_tuple(values):
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class PwlFunction:
    """An exact piecewise-linear function in canonical (merged) form."""

    shape: Shape
    value_at_zero: Fraction
    breakpoints: tuple
    slopes: tuple

    def __post_init__(self):
        object.__setattr__(self, "value_at_zero", Fraction(self.value_at_zero))
        bps = _as_fraction_tuple(self.breakpoints)
        slopes = _as_fraction_tuple(self.slopes)
        if len(slopes) != len(bps) + 1:
            raise ValueError(
                "need exactly one slope per piece: %d breakpoints require %d "
                "slopes, got %d" % (len(bps), len(bps) + 1, len(slopes))
            )
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly ascending: %s" % (bps,))
        bps, slopes = _merge_equal_slopes(bps, slopes)
        if self.shape is Shape.CONVEX:
            if any(a > b for a, b in zip(slopes, slopes[1:])):
                raise ValueError("convex function needs nondecreasing slopes")
        else:
            if any(a < b for a, b in zip(slopes, slopes[1:])):
                raise ValueError("concave function needs nonincreasing slopes")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)

    # -- constructors ------------------------------------------------------

    @classmethod
    def linear(cls, slope, value_at_zero=ZERO, shape=Shape.CONVEX):
        """A one-piece (linear) function; linear counts as convex and concave."""
        return cls(shape, Fraction(value_at_zero), (), (Fraction(slope),))

    @classmethod
    def from_sorted_weights(cls, weights):
        """Convex cost of taking k items: prefix sums of ascending weights.

        f(k) = sum of the k smallest weights; f(0) = 0.  The empty collection
        gives the constant zero function.
        """
        ws = sorted(Fraction(w) for w in weights)
        if ws and ws[0] < 0:
            raise ValueError("weights must be nonnegative")
        if not ws:
            return cls(Shape.CONVEX, ZERO, (), (ZERO,))
        bps = tuple(Fraction(i) for i in range(1, len(ws)))
        return cls(Shape.CONVEX, ZERO, bps, tuple(ws))

    @classmethod
    def from_sorted_multiplicities(cls, multiplicities):
        """Concave yield of taking k items: prefix sums of descending values.

        f(k) = sum of the k largest multiplicities; f(0) = 0.
        """
        ts = sorted((Fraction(t) for t in multiplicities), reverse=True)
        if ts and ts[-1] < 0:
            raise ValueError("multiplicities must be nonnegative")
        if not ts:
            return cls(Shape.CONCAVE, ZERO, (), (ZERO,))
        bps = tuple(Fraction(i) for i in range(1, len(ts)))
        return cls(Shape.CONCAVE, ZERO, bps, tuple(ts))

    # -- basic queries -----------------------------------------------------

    @property
    def pieces(self) -> int:
        return len(self.slopes)

    @property
    def is_linear(self) -> bool:
        return len(self.slopes) == 1

    def piece_index(self, x) -> int:
        """Index of the piece containing x (pieces are left-open, right-closed)."""
        x = Fraction(x)
        k = 0
        for bp in self.breakpoints:
            if bp < x:
                k += 1
            else:
                break
        return k

    def eval(self, x) -> Fraction:
        x = Fraction(x)
        total = self.value_at_zero + x * self.slopes[0]
        for bp, lo, hi in zip(self.breakpoints, self.slopes, self.slopes[1:]):
            step = hi - lo
            if x > bp:
                total += (x - bp) * step
            if bp < 0:
                total -= (-bp) * step
        return total

    def range_on(self, lower, upper):
        """Exact (min, max) of the function over [lower, upper].

        ``upper`` may be None (unbounded above); ``lower`` must be finite.
        Returns None for an infinite bound.  Extrema of a piecewise-linear
        function on a box lie at endpoints or breakpoints, so both values
        come from finitely many evaluations.
        """
        lower = Fraction(lower)
        xs = [lower]
        for bp in self.breakpoints:
            if bp > lower and (upper is None or bp < upper):
                xs.append(bp)
        if upper is not None:
            upper = Fraction(upper)
            if upper < lower:
                raise ValueError("empty interval")
            xs.append(upper)
        vals = [self.eval(x) for x in xs]
        lo = None if (upper is None and self.slopes[-1] < 0) else min(vals)
        hi = None if (upper is None and self.slopes[-1] > 0) else max(vals)
        return lo, hi

    def with_value_at_zero(self, value) -> "PwlFunction":
        return PwlFunction(self.shape, Fraction(value), self.breakpoints, self.slopes)

    def drop_negative_breakpoints(self) -> "PwlFunction":
        """Merge pieces lying entirely left of 0 into the zeroth piece.

        The result agrees with the original for all x >= min(0, first kept
        breakpoint) and keeps value_at_zero; only the shape left of 0 changes.
        """
        k = 0
        while k < len(self.breakpoints) and self.breakpoints[k] < 0:
            k += 1
        if k == 0:
            return self
        return PwlFunction(
            self.shape, self.value_at_zero, self.breakpoints[k:], self.slopes[k:]
        )

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "shape": self.shape.value,
            "value_at_zero": format_rational(self.value_at_zero),
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "slopes": [format_rational(s) for s in self.slopes],
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise ValueError("piecewise-linear function must be a JSON object")
        try:
            shape = Shape(obj["shape"])
        except (KeyError, ValueError) as exc:
            raise ValueError("shape must be 'convex' or 'concave'") from exc
        return cls(
            shape,
            parse_rational(obj.get("value_at_zero", 0)),
            tuple(parse_rational(b) for b in obj.get("breakpoints", ())),
            tuple(parse_rational(s) for s in obj.get("slopes", ())),
        )


def _merge_equal_slopes(bps, slopes):
    """Drop breakpoints between pieces of equal slope (canonical form)."""
    if not bps:
        return bps, slopes
    out_b, out_s = [], [slopes[0]]
    for bp, s in zip(bps, slopes[1:]):
        if s == out_s[-1]:
            continue
        out_b.append(bp)
        out_s.append(s)
    return tuple(out_b), tuple(out_s)
