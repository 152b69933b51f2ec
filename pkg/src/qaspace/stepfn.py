"""Step functions on [0,1] with exact breakpoint arithmetic.

A step function is a finite list of half-open pieces [t_{i-1}, t_i) carrying
constant values, with the last piece closed at 1.  Breakpoints are stored as
`fractions.Fraction`: every float is a dyadic rational, so conversion is
lossless and measures, merged grids, and rearrangements come out exact.
Values are plain floats.

Operations return canonical functions (adjacent equal values merged), so
comparing canonical forms is a meaningful equality test, and anything that
depends only on the value distribution is reproducible bit for bit across
rearrangement.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .errors import NegativePiece, SpecParseError, ZeroFunction

__all__ = [
    "StepFunction",
    "NestedForm",
    "indicator",
    "constant",
    "distribution",
    "rearrange",
    "nested_form",
    "l1_norm",
    "linf_norm",
    "l1_norm_exact",
    "add",
    "scale",
    "abs_",
    "random_step_function",
]

_ONE = Fraction(1)
_ZERO = Fraction(0)


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on [0,1].

    breakpoints: m+1 strictly increasing Fractions from 0 to 1.
    values: m finite floats, values[i] taken on [breakpoints[i], breakpoints[i+1]).
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bps = tuple(b if isinstance(b, Fraction) else Fraction(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        if len(bps) < 2 or len(vals) != len(bps) - 1:
            raise ValueError("need m+1 breakpoints for m values, m >= 1")
        if bps[0] != _ZERO or bps[-1] != _ONE:
            raise ValueError("breakpoints must start at 0 and end at 1")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")
        for v in vals:
            if not math.isfinite(v):
                raise ValueError("values must be finite")

    @property
    def pieces(self) -> int:
        return len(self.values)

    def canonical(self) -> "StepFunction":
        """Merge adjacent pieces that carry the same value."""
        bps = [self.breakpoints[0]]
        vals = []
        for i, v in enumerate(self.values):
            if vals and v == vals[-1]:
                bps[-1] = self.breakpoints[i + 1]
                continue
            vals.append(v)
            bps.append(self.breakpoints[i + 1])
        return StepFunction(tuple(bps), tuple(vals))

    def eval_at(self, x) -> float:
        """Value at x in [0,1]; the right endpoint belongs to the last piece."""
        xf = x if isinstance(x, Fraction) else Fraction(x)
        if xf < 0 or xf > 1:
            raise ValueError("step functions live on [0,1]")
        if xf == _ONE:
            return self.values[-1]
        idx = bisect_right(self.breakpoints, xf) - 1
        return self.values[idx]

    def piece_measures(self) -> tuple:
        """Exact lengths of the pieces, as Fractions."""
        return tuple(b - a for a, b in zip(self.breakpoints, self.breakpoints[1:]))

    def to_json(self) -> dict:
        return {
            "breakpoints": [float(b) for b in self.breakpoints],
            "values": list(self.values),
        }

    @classmethod
    def from_json(cls, obj) -> "StepFunction":
        if not isinstance(obj, dict):
            raise SpecParseError("step function spec must be an object")
        extra = set(obj) - {"breakpoints", "values"}
        if extra:
            raise SpecParseError(f"unknown step function keys: {sorted(extra)}")
        try:
            bps = [Fraction(float(b)) for b in obj["breakpoints"]]
            vals = [float(v) for v in obj["values"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecParseError(f"malformed step function spec: {exc}") from exc
        try:
            return cls(tuple(bps), tuple(vals))
        except ValueError as exc:
            raise SpecParseError(str(exc)) from exc


@dataclass(frozen=True)
class NestedForm:
    """Layer representation sum_k levels[k] * indicator([0, measures[k])).

    levels are positive floats, measures strictly increasing Fractions.
    Rebuilding the layers reproduces the decreasing rearrangement.
    """

    levels: tuple
    measures: tuple

    def __post_init__(self):
        levels = tuple(float(b) for b in self.levels)
        measures = tuple(m if isinstance(m, Fraction) else Fraction(m) for m in self.measures)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "measures", measures)
        if len(levels) != len(measures) or not levels:
            raise ValueError("levels and measures must be non-empty and equal length")
        if any(b <= 0 for b in levels):
            raise ValueError("levels must be positive")
        for a, b in zip(measures, measures[1:]):
            if not a < b:
                raise ValueError("measures must be strictly increasing")
        if measures[-1] > 1:
            raise ValueError("measures cannot exceed 1")

    @property
    def layers(self) -> int:
        return len(self.levels)

    def reconstruct(self) -> StepFunction:
        """Sum the layers back into a decreasing step function."""
        vals = [math.fsum(self.levels[k:]) for k in range(len(self.levels))]
        bps = [_ZERO, *self.measures]
        if self.measures[-1] != _ONE:
            bps.append(_ONE)
            vals.append(0.0)
        return StepFunction(tuple(bps), tuple(vals)).canonical()


def indicator(a, b, height: float = 1.0) -> StepFunction:
    """height * indicator([a, b)) as a canonical step function."""
    af, bf = Fraction(a), Fraction(b)
    if not 0 <= af < bf <= 1:
        raise ValueError("need 0 <= a < b <= 1")
    bps = [_ZERO]
    vals = []
    if af > 0:
        bps.append(af)
        vals.append(0.0)
    bps.append(bf)
    vals.append(float(height))
    if bf < 1:
        bps.append(_ONE)
        vals.append(0.0)
    return StepFunction(tuple(bps), tuple(vals)).canonical()


def constant(c: float) -> StepFunction:
    return StepFunction((_ZERO, _ONE), (float(c),))


def _distribution_exact(f: StepFunction, s: float) -> Fraction:
    total = _ZERO
    for v, m in zip(f.values, f.piece_measures()):
        if abs(v) > s:
            total += m
    return total


def distribution(f: StepFunction, s: float) -> float:
    """Measure of {x : |f(x)| > s}."""
    return float(_distribution_exact(f, s))


def rearrange(f: StepFunction) -> StepFunction:
    """Decreasing rearrangement: same value distribution, sorted descending."""
    pairs = sorted(
        zip((abs(v) for v in f.values), f.piece_measures()),
        key=lambda p: -p[0],
    )
    bps = [_ZERO]
    vals = []
    acc = _ZERO
    for v, m in pairs:
        acc += m
        bps.append(acc)
        vals.append(v)
    return StepFunction(tuple(bps), tuple(vals)).canonical()


def nested_form(f: StepFunction) -> NestedForm:
    """Layer-cake form of a non-negative f: levels between consecutive
    distinct values, measures of the superlevel sets."""
    if any(v < 0 for v in f.values):
        raise NegativePiece("nested form needs f >= 0")
    star = rearrange(f)
    vals = [v for v in star.values if v > 0]
    if not vals:
        raise ZeroFunction("nested form is undefined for f == 0")
    cum = []
    acc = _ZERO
    for v, m in zip(star.values, star.piece_measures()):
        if v > 0:
            acc += m
            cum.append(acc)
    levels = []
    for k, v in enumerate(vals):
        nxt = vals[k + 1] if k + 1 < len(vals) else 0.0
        levels.append(v - nxt)
    return NestedForm(tuple(levels), tuple(cum))


def l1_norm_exact(f: StepFunction) -> Fraction:
    """Integral of |f| as an exact rational (values are dyadic too)."""
    total = _ZERO
    for v, m in zip(f.values, f.piece_measures()):
        if v:
            total += Fraction(abs(v)) * m
    return total


def l1_norm(f: StepFunction) -> float:
    return float(l1_norm_exact(f))


def linf_norm(f: StepFunction) -> float:
    """Essential sup of |f|; every piece has positive measure."""
    return max(abs(v) for v in f.values)


def _merged_grid(f: StepFunction, g: StepFunction) -> list:
    merged = sorted(set(f.breakpoints) | set(g.breakpoints))
    return merged


def add(f: StepFunction, g: StepFunction) -> StepFunction:
    """Pointwise sum on the merged breakpoint grid."""
    grid = _merged_grid(f, g)
    vals = []
    fi = gi = 0
    for left in grid[:-1]:
        while f.breakpoints[fi + 1] <= left:
            fi += 1
        while g.breakpoints[gi + 1] <= left:
            gi += 1
        vals.append(f.values[fi] + g.values[gi])
    return StepFunction(tuple(grid), tuple(vals)).canonical()


def scale(f: StepFunction, a: float) -> StepFunction:
    return StepFunction(f.breakpoints, tuple(float(a) * v for v in f.values)).canonical()


def abs_(f: StepFunction) -> StepFunction:
    return StepFunction(f.breakpoints, tuple(abs(v) for v in f.values)).canonical()


def random_step_function(
    rng,
    max_pieces: int = 12,
    vmax: float = 10.0,
    value_pool=None,
    denominator: int = 10_000,
    signed: bool = False,
) -> StepFunction:
    """Seeded random step function; breakpoints on a uniform rational grid."""
    m = rng.randint(1, max_pieces)
    cuts = sorted(rng.sample(range(1, denominator), min(m - 1, denominator - 1)))
    bps = [_ZERO, *(Fraction(c, denominator) for c in cuts), _ONE]
    vals = []
    for _ in range(len(bps) - 1):
        if value_pool is not None:
            v = float(rng.choice(value_pool))
        else:
            v = rng.uniform(0.0, vmax)
        if signed and rng.random() < 0.5:
            v = -v
        vals.append(v)
    return StepFunction(tuple(bps), tuple(vals)).canonical()
