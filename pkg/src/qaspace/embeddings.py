"""Comparison profiles that decide embeddings into the decomposition space.

The central profile is

    tau(t) = phi(t) * psi(1 + max(0, log(phi(t)/t))),

the cost of covering an indicator of measure t when the slot index is priced
by psi through the log of the per-measure cost.  Membership of a Lorentz-type
space in the decomposition space reduces to comparing its shape against tau.

A decreasing sequence s gives two more profiles:

    phi_s(t)  = inf_n max{s_n, t} * (phi(s_n)/s_n) * psi(n)
    alpha_s(t) = phi(t) * psi(s_inverse(t))

which agree with tau up to constants for good sequences; the sequence
s(x) = gamma_inv(e^{x-1}) makes alpha_s and tau coincide wherever
phi(t)/t >= 1.  `check_seq_conditions` reports grid evidence for the four
conditions a sequence must satisfy, including the empirical step-growth
constant for phi(s_n)/s_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

from .errors import DomainError, NonPositiveValue, NotInvertible, SpecParseError
from .logs import LOG_ZERO
from .shapes import ShapeFunction, log_gamma, log_gamma_inv

__all__ = [
    "tau",
    "log_tau",
    "SequenceSpec",
    "reciprocal",
    "gamma_exp",
    "sample_sequence",
    "PhiSValue",
    "phi_s",
    "alpha_s",
    "SeqConditionReport",
    "check_seq_conditions",
    "EquivalenceReport",
    "equivalence",
    "omega_n",
    "iterated_log_profile",
]


def _psi_arg(phi: ShapeFunction, log_t: float) -> float:
    """1 + max(0, log(phi(t)/t)), the slot index priced into tau."""
    return 1.0 + max(0.0, log_gamma(phi, log_t))


def tau(phi: ShapeFunction, psi: ShapeFunction, t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError("tau needs t in [0,1]")
    if t == 0.0:
        return 0.0
    lt = math.log(t)
    return phi.eval(t) * psi.eval(_psi_arg(phi, lt))


def log_tau(phi: ShapeFunction, psi: ShapeFunction, log_t: float) -> float:
    """log(tau(exp(log_t))), usable at depths where t itself underflows."""
    if log_t > 0.0:
        raise DomainError("tau needs log_t <= 0")
    return phi.log_eval(log_t) + math.log(psi.eval(_psi_arg(phi, log_t)))


@dataclass(frozen=True)
class SequenceSpec:
    """A decreasing sequence of measures in (0,1], evaluated on [domain_start, inf).

    kinds: "reciprocal" is s(x) = 1/x; "gamma_exp" is s(x) = gamma_inv(e^{x-1})
    for the attached phi (so log(phi(s)/s) at s(x) is exactly x-1); "samples"
    interpolates explicit (x, s) pairs.  Sample sequences are not required to
    decrease at construction time, the condition check reports that instead;
    inverse() does require strict decrease.
    """

    kind: str
    phi: ShapeFunction | None = None
    samples: tuple | None = None
    domain_start: float = 1.0

    def __post_init__(self):
        if self.kind not in ("reciprocal", "gamma_exp", "samples"):
            raise SpecParseError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "gamma_exp" and self.phi is None:
            raise SpecParseError("gamma_exp needs its phi shape")
        if self.kind == "samples":
            pts = self.samples
            if not pts or len(pts) < 2:
                raise SpecParseError("sample sequences need at least two points")
            pts = tuple((float(x), float(s)) for x, s in pts)
            object.__setattr__(self, "samples", pts)
            xs = [x for x, _ in pts]
            if any(not b > a for a, b in zip(xs, xs[1:])):
                raise SpecParseError("sample abscissae must strictly increase")
            if any(not 0.0 < s <= 1.0 for _, s in pts):
                raise SpecParseError("sample values must lie in (0,1]")
            object.__setattr__(self, "domain_start", xs[0])

    def _check_x(self, x: float):
        if x < self.domain_start - 1e-12:
            raise DomainError(f"sequence defined from {self.domain_start}, got {x!r}")

    def value(self, x: float) -> float:
        x = float(x)
        self._check_x(x)
        if self.kind == "reciprocal":
            return 1.0 / x
        if self.kind == "gamma_exp":
            return math.exp(self.log_value(x))
        pts = self.samples
        if x > pts[-1][0]:
            raise DomainError(f"sample sequence ends at {pts[-1][0]}, got {x!r}")
        for (x0, s0), (x1, s1) in zip(pts, pts[1:]):
            if x <= x1:
                return s0 + (s1 - s0) * (x - x0) / (x1 - x0)
        return pts[-1][1]

    def log_value(self, x: float) -> float:
        x = float(x)
        self._check_x(x)
        if self.kind == "reciprocal":
            return -math.log(x)
        if self.kind == "gamma_exp":
            return log_gamma_inv(self.phi, x - 1.0)
        return math.log(self.value(x))

    def inverse(self, t: float) -> float:
        """x with s(x) = t; monotone inversion."""
        t = float(t)
        if not 0.0 < t <= 1.0:
            raise DomainError("sequence values live in (0,1]")
        if self.kind == "reciprocal":
            x = 1.0 / t
            self._check_x(x)
            return x
        if self.kind == "gamma_exp":
            x = 1.0 + log_gamma(self.phi, math.log(t))
            if x < self.domain_start - 1e-9:
                raise DomainError(f"{t!r} is above the sequence's first value")
            return max(x, self.domain_start)
        pts = self.samples
        ss = [s for _, s in pts]
        if any(not b < a for a, b in zip(ss, ss[1:])):
            raise NotInvertible("sample sequence is not strictly decreasing")
        if not ss[-1] <= t <= ss[0]:
            raise DomainError(f"{t!r} outside sampled range [{ss[-1]}, {ss[0]}]")
        for (x0, s0), (x1, s1) in zip(pts, pts[1:]):
            if t >= s1:
                return x0 + (x1 - x0) * (s0 - t) / (s0 - s1)
        return pts[-1][0]


def reciprocal() -> SequenceSpec:
    return SequenceSpec("reciprocal")


def gamma_exp(phi: ShapeFunction) -> SequenceSpec:
    start = max(1.0, 1.0 + math.log(phi.eval(1.0)))
    return SequenceSpec("gamma_exp", phi=phi, domain_start=start)


def sample_sequence(pairs) -> SequenceSpec:
    return SequenceSpec("samples", samples=tuple(pairs))


class PhiSValue(NamedTuple):
    value: float
    n: int


@lru_cache(maxsize=16)
def _term_table(phi: ShapeFunction, psi: ShapeFunction, seq: SequenceSpec, n_max: int):
    """Per-index data (log s_n, log(gamma(s_n) * psi(n))) for n up to n_max.

    gamma_exp indices whose s_n falls below every representable float keep a
    -inf sentinel; their per-measure cost is still exact since
    log(gamma(s(x))) = x - 1 by construction.
    """
    n_start = max(1, math.ceil(seq.domain_start - 1e-12))
    rows = []
    for n in range(n_start, n_max + 1):
        if seq.kind == "gamma_exp":
            lg = n - 1.0
            try:
                ls = seq.log_value(float(n))
            except NotInvertible:
                ls = LOG_ZERO
        else:
            try:
                ls = seq.log_value(float(n))
            except DomainError:
                break
            lg = log_gamma(phi, ls)
        rows.append((ls, lg + math.log(psi.eval(float(n)))))
    return n_start, tuple(rows)


def phi_s(
    phi: ShapeFunction,
    psi: ShapeFunction,
    seq: SequenceSpec,
    t: float,
    n_max: int = 10_000,
) -> PhiSValue:
    """Truncated infimum over n <= n_max of max{s_n, t} * gamma(s_n) * psi(n).

    Returns the value and the achieving index.  The scan stops early once the
    sequence has dropped below t and the terms have been non-decreasing for 32
    consecutive indices; the truncation is trustworthy once n_max reaches past
    the crossover s_n ~ t.
    """
    t = float(t)
    if t == 0.0:
        return PhiSValue(0.0, 0)
    if not 0.0 < t <= 1.0:
        raise DomainError("phi_s needs t in [0,1]")
    lt = math.log(t)
    n_start, rows = _term_table(phi, psi, seq, n_max)
    best = math.inf
    best_n = n_start
    worse = 0
    for r, (ls, base) in enumerate(rows):
        term = max(ls, lt) + base
        if term < best:
            best, best_n = term, n_start + r
            worse = 0
        elif ls < lt:
            worse += 1
            if worse >= 32:
                break
        else:
            worse = 0
    return PhiSValue(math.exp(best), best_n)


def alpha_s(phi: ShapeFunction, psi: ShapeFunction, seq: SequenceSpec, t: float) -> float:
    """phi(t) * psi(s_inverse(t)); for the gamma_exp sequence this equals tau
    wherever phi(t)/t >= 1, bit for bit."""
    t = float(t)
    if t == 0.0:
        return 0.0
    if not 0.0 < t <= 1.0:
        raise DomainError("alpha_s needs t in [0,1]")
    return phi.eval(t) * psi.eval(seq.inverse(t))


@dataclass(frozen=True)
class SeqConditionReport:
    """Grid evidence for the four sequence conditions.

    monotone_decreasing / tends_to_zero cover s itself; the product fields
    cover phi(s(x)) * psi(x) (decay, and non-increase beyond the located
    tail start); step_ratio_constant is the empirical max of
    gamma(s(n+1))/gamma(s(n)) over integer steps in the grid span.
    """

    monotone_decreasing: bool
    tends_to_zero: bool
    product_tends_to_zero: bool
    product_tail_start: float | None
    product_tail_monotone: bool
    step_ratio_constant: float
    grid: tuple

    @property
    def passed(self) -> bool:
        return (
            self.monotone_decreasing
            and self.tends_to_zero
            and self.product_tends_to_zero
            and self.product_tail_monotone
            and math.isfinite(self.step_ratio_constant)
        )


def check_seq_conditions(
    phi: ShapeFunction,
    psi: ShapeFunction,
    seq: SequenceSpec,
    x_grid,
) -> SeqConditionReport:
    xs = [float(x) for x in x_grid]
    if len(xs) < 3 or any(not b > a for a, b in zip(xs, xs[1:])):
        raise ValueError("x_grid must be at least 3 strictly increasing points")
    log_s = [seq.log_value(x) for x in xs]
    log_prod = [phi.log_eval(ls) + math.log(psi.eval(x)) for ls, x in zip(log_s, xs)]

    dec = all(b <= a + 1e-12 for a, b in zip(log_s, log_s[1:])) and log_s[-1] < log_s[0]
    to_zero = dec and (log_s[0] - log_s[-1]) >= math.log(10.0)

    # last index where the product still rises; the tail starts after it
    rise = -1
    for i in range(len(log_prod) - 1):
        if log_prod[i + 1] > log_prod[i] + 1e-10:
            rise = i
    tail_idx = rise + 1
    tail_monotone = tail_idx <= len(xs) - 2
    tail_start = xs[tail_idx] if tail_monotone else None
    prod_zero = tail_monotone and (max(log_prod) - log_prod[-1]) >= math.log(10.0)

    n_lo = max(1, math.ceil(max(seq.domain_start, xs[0]) - 1e-12))
    n_hi = math.floor(xs[-1] + 1e-12) - 1
    constant = math.nan
    if n_hi >= n_lo:
        ratios = []
        for n in range(n_lo, n_hi + 1):
            g0 = log_gamma(phi, seq.log_value(float(n)))
            g1 = log_gamma(phi, seq.log_value(float(n + 1)))
            ratios.append(math.exp(g1 - g0))
        constant = max(ratios)

    return SeqConditionReport(
        monotone_decreasing=dec,
        tends_to_zero=to_zero,
        product_tends_to_zero=prod_zero,
        product_tail_start=tail_start,
        product_tail_monotone=tail_monotone,
        step_ratio_constant=constant,
        grid=tuple(xs),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    """Ratio statistics of two positive functions over a log grid.

    equivalent is None unless the caller supplies a threshold; the library
    never hard-codes what counts as comparable.
    """

    ratio_min: float
    ratio_max: float
    grid: tuple
    equivalent: bool | None

    @property
    def spread(self) -> float:
        return self.ratio_max / self.ratio_min


def log_grid(t_min: float, t_max: float, points: int) -> list:
    if not (0.0 < t_min < t_max) or points < 2:
        raise ValueError("need 0 < t_min < t_max and at least two points")
    lo, hi = math.log(t_min), math.log(t_max)
    grid = [math.exp(lo + (hi - lo) * i / (points - 1)) for i in range(points)]
    grid[0], grid[-1] = t_min, t_max
    return grid


def equivalence(
    fn_a: Callable[[float], float],
    fn_b: Callable[[float], float],
    t_min: float,
    t_max: float,
    points: int = 200,
    threshold: float | None = None,
) -> EquivalenceReport:
    grid = log_grid(t_min, t_max, points)
    ratios = []
    for t in grid:
        va, vb = fn_a(t), fn_b(t)
        if not (math.isfinite(va) and math.isfinite(vb)) or va <= 0.0 or vb <= 0.0:
            raise NonPositiveValue(f"need positive finite samples, got {va!r}/{vb!r} at t={t!r}")
        ratios.append(va / vb)
    rmin, rmax = min(ratios), max(ratios)
    verdict = None if threshold is None else (rmax / rmin) <= threshold
    return EquivalenceReport(rmin, rmax, tuple(grid), verdict)


def omega_n(phi_x: ShapeFunction, phi: ShapeFunction, witness) -> float:
    """sup over the witness measures of phi_x(mu)/phi(mu), in the log domain.

    witness is a built extremal function (its log_mu attribute is used).
    The ratio is formed from the per-measure-cost logs, whose common log mu
    part cancels symbolically; subtracting the shapes' own logs instead loses
    the ratio to rounding once log mu passes 1e16.  Identical shapes give
    exactly 1.0; a ratio beyond the float range reports inf.
    """
    best = max(
        phi_x.log_gamma_eval(lm) - phi.log_gamma_eval(lm) for lm in witness.log_mu
    )
    try:
        return math.exp(best)
    except OverflowError:
        return math.inf


def iterated_log_profile(alpha: float, beta: float, exponent: float) -> Callable[[float], float]:
    """Closed-form comparison profile t^alpha * L^beta * (iterated L)^exponent.

    L is 1 + log(1/t).  For alpha < 1 the last factor uses the double log; at
    alpha = 1 (and beta != 0) it uses the triple log.  Matches the deep-t
    behaviour of tau for the stock families.
    """
    alpha, beta, exponent = float(alpha), float(beta), float(exponent)
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0,1]")
    if alpha == 1.0 and beta == 0.0:
        raise ValueError("alpha=1, beta=0 has no iterated-log profile")

    def profile(t: float) -> float:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise DomainError("profile defined on [0,1]")
        if t == 0.0:
            return 0.0
        level1 = 1.0 - math.log(t)
        level2 = 1.0 + math.log(level1)
        if alpha < 1.0:
            return t**alpha * level1**beta * level2**exponent
        level3 = 1.0 + math.log(level2)
        return t * level1**beta * level3**exponent

    return profile
