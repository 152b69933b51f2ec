"""Two-sided bounds for the decomposition norm.

The norm of f is the infimum, over countable covers |f| <= sum_n g_n by
non-negative bounded pieces, of sum_n psi(n) * linf(g_n) * phi(l1/linf of g_n).
Pieces are interchangeable, so for a fixed finite set of pieces the optimal
order pairs the largest piece weight with the smallest psi(n): sorting the
weights descending and assigning n = 1, 2, ... is exact (rearrangement
argument), which prunes all assignment permutations.

Candidate covers are built from the layer-cake form of |f|: every candidate
groups consecutive layers, and a group of layers i..j collapses into the
single piece clamp(|f| - a_{j+1}, 0, a_i - a_{j+1}), whose cost depends only
on the value distribution.  Searching consecutive groupings does not certify
the true infimum; the results are upper bounds, paired with the rigorous
lower bound max(psi(1) * lorentz, phi(1)psi(1) * l1).

Strategies: "singleton" covers |f| by itself; "layers" uses one piece per
layer; "local_search" greedily merges adjacent groups while the total cost
strictly decreases (first improving merge in a left-to-right scan, re-sorted
after each merge); "exhaustive" tries all 2^(k-1) consecutive groupings of k
layers and is capped at 10 layers.  Every strategy also considers the weaker
candidates, so upper bounds can only improve from singleton downward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import stepfn
from .errors import NegativePiece, TooManyLayers
from .logs import LOG_ZERO, logdiffexp, logsumexp
from .lorentz import lorentz_norm, weighted_sup_bound
from .shapes import ShapeFunction
from .stepfn import StepFunction

__all__ = [
    "Decomposition",
    "NormBounds",
    "piece_cost",
    "qa_lower",
    "qa_upper",
    "qa_bounds",
    "STRATEGIES",
]

STRATEGIES = ("singleton", "layers", "local_search", "exhaustive")

_EXHAUSTIVE_CAP = 10


@dataclass(frozen=True)
class Decomposition:
    """A concrete cover; pieces are listed in assignment order (position = n)."""

    pieces: tuple
    cost: float

    def recomputed_cost(self, phi: ShapeFunction, psi: ShapeFunction) -> float:
        return math.fsum(
            piece_cost(g, n + 1, phi, psi) for n, g in enumerate(self.pieces)
        )


@dataclass(frozen=True)
class NormBounds:
    """lower <= norm <= upper, with the winning lower source and the cover."""

    lower: float
    upper: float
    lower_source: str
    upper_witness: Decomposition

    @property
    def ratio(self) -> float:
        if self.lower == 0.0:
            return 1.0 if self.upper == 0.0 else math.inf
        return self.upper / self.lower


def piece_cost(g: StepFunction, n: int, phi: ShapeFunction, psi: ShapeFunction) -> float:
    """psi(n) * linf(g) * phi(l1(g)/linf(g)) for a non-negative piece at slot n."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("slot n must be a positive integer")
    if any(v < 0 for v in g.values):
        raise NegativePiece("decomposition pieces must be non-negative")
    linf = stepfn.linf_norm(g)
    if linf == 0.0:
        return 0.0
    ratio = float(stepfn.l1_norm_exact(g) / Fraction(linf))
    return psi.eval(float(n)) * weighted_sup_bound(linf, ratio, phi)


def qa_lower(f: StepFunction, phi: ShapeFunction, psi: ShapeFunction) -> float:
    """Rigorous lower bound: max of the Lorentz route and the l1 route."""
    return _lower_detail(f, phi, psi)[0]


def _lower_detail(f: StepFunction, phi: ShapeFunction, psi: ShapeFunction) -> tuple:
    psi1 = psi.eval(1.0)
    via_lorentz = psi1 * lorentz_norm(f, phi).value
    via_l1 = phi.eval(1.0) * psi1 * stepfn.l1_norm(f)
    if via_l1 > via_lorentz:
        return via_l1, "l1"
    return via_lorentz, "lorentz"


class _LayerTable:
    """Distinct layer values of |f| with exact ring measures and cached group weights.

    vals: distinct positive values, descending.  cum[k]: exact measure of
    {|f| >= vals[k]}.  weight(i, j) is the psi-free cost of collapsing layers
    i..j into one piece; its l1 uses the same floats as the materialized
    piece, so costs recompute bit for bit from the pieces.
    """

    def __init__(self, f_abs: StepFunction, phi: ShapeFunction):
        self.f_abs = f_abs
        self.phi = phi
        rings = {}
        for v, m in zip(f_abs.values, f_abs.piece_measures()):
            if v > 0.0:
                rings[v] = rings.get(v, Fraction(0)) + m
        self.vals = sorted(rings, reverse=True)
        cum = []
        acc = Fraction(0)
        for v in self.vals:
            acc += rings[v]
            cum.append(acc)
        self.cum = cum
        self.rings = [rings[v] for v in self.vals]
        self._weights: dict = {}

    @property
    def layers(self) -> int:
        return len(self.vals)

    def weight(self, i: int, j: int) -> float:
        key = (i, j)
        got = self._weights.get(key)
        if got is not None:
            return got
        floor = self.vals[j + 1] if j + 1 < len(self.vals) else 0.0
        linf = self.vals[i] - floor
        total = Fraction(0)
        for l in range(j + 1):
            ring_value = self.vals[max(l, i)] - floor
            total += Fraction(ring_value) * self.rings[l]
        ratio = float(total / Fraction(linf))
        w = weighted_sup_bound(linf, ratio, self.phi)
        self._weights[key] = w
        return w

    def materialize(self, i: int, j: int) -> StepFunction:
        """The group piece on f's own grid: clamp(|f| - floor, 0, height)."""
        floor = self.vals[j + 1] if j + 1 < len(self.vals) else 0.0
        height = self.vals[i] - floor
        vals = tuple(min(max(v - floor, 0.0), height) for v in self.f_abs.values)
        return StepFunction(self.f_abs.breakpoints, vals).canonical()


def _group_total(weights, psi_at) -> float:
    ws = sorted(weights, reverse=True)
    return math.fsum(p * w for p, w in zip(psi_at, ws))


def _local_search(table: _LayerTable, psi_at) -> list:
    groups = [(k, k) for k in range(table.layers)]
    total = _group_total([table.weight(i, j) for i, j in groups], psi_at)
    improved = True
    while improved and len(groups) > 1:
        improved = False
        for idx in range(len(groups) - 1):
            cand = (
                groups[:idx]
                + [(groups[idx][0], groups[idx + 1][1])]
                + groups[idx + 2 :]
            )
            t = _group_total([table.weight(i, j) for i, j in cand], psi_at)
            if t < total:
                groups, total = cand, t
                improved = True
                break
    return groups


def _compositions(n: int):
    """All partitions of layers 0..n-1 into consecutive groups."""
    for mask in range(1 << (n - 1)):
        groups = []
        start = 0
        for pos in range(n - 1):
            if mask & (1 << pos):
                groups.append((start, pos))
                start = pos + 1
        groups.append((start, n - 1))
        yield groups


def qa_upper(
    f: StepFunction,
    phi: ShapeFunction,
    psi: ShapeFunction,
    strategy: str = "layers",
    max_layers: int = _EXHAUSTIVE_CAP,
) -> NormBounds:
    """Upper bound from the requested search strategy, with the lower bound attached."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; pick one of {STRATEGIES}")
    lower, source = _lower_detail(f, phi, psi)
    table = _LayerTable(stepfn.abs_(f), phi)
    n = table.layers
    if n == 0:
        return NormBounds(lower, 0.0, source, Decomposition((), 0.0))

    psi_at = [psi.eval(float(r + 1)) for r in range(n)]
    candidates = [[(0, n - 1)], [(k, k) for k in range(n)]]
    if strategy == "local_search":
        candidates.append(_local_search(table, psi_at))
    elif strategy == "exhaustive":
        cap = min(max_layers, _EXHAUSTIVE_CAP)
        if n > cap:
            raise TooManyLayers(
                f"{n} layers exceed the exhaustive cap {cap}; use local_search"
            )
        candidates.extend(_compositions(n))

    best_total = math.inf
    best_groups = None
    for groups in candidates:
        total = _group_total([table.weight(i, j) for i, j in groups], psi_at)
        if total < best_total:
            best_total, best_groups = total, groups

    ordered = sorted(
        best_groups, key=lambda ij: (-table.weight(*ij), ij[0])
    )
    pieces = tuple(table.materialize(i, j) for i, j in ordered)
    witness = Decomposition(pieces, best_total)
    return NormBounds(lower, best_total, source, witness)


def qa_bounds(f: StepFunction, phi: ShapeFunction, psi: ShapeFunction) -> NormBounds:
    """Best available bounds: exhaustive when the layer count permits."""
    f_abs = stepfn.abs_(f)
    distinct = len({v for v in f_abs.values if v > 0.0})
    strategy = "exhaustive" if distinct <= _EXHAUSTIVE_CAP else "local_search"
    return qa_upper(f, phi, psi, strategy=strategy)


def log_layer_weight(log_vals, log_rings, log_masses, i: int, j: int, phi: ShapeFunction) -> float:
    """Log cost of merging descending-value layers i..j into one piece.

    log_masses[l] is log(value_l * ring_l), supplied separately because at
    extreme depth log_vals[l] and log_rings[l] are rounded to exact negatives
    of each other and their sum no longer knows the product.  Shared by the
    log-domain grouping search and the extremal-function Lorentz evaluation,
    so that the psi == 1 coincidence of the two is exact rather than close.

    The cost linf * phi(l1/linf) is assembled as l1 * (phi/id)(l1/linf): the
    ratio's log may lose its l1 part to absorption once linf is e^1e17 or so,
    but it only enters through the slowly varying per-measure cost, while in
    the direct form the same absorption corrupts the leading factor.
    """
    n = len(log_vals)
    lfloor = log_vals[j + 1] if j + 1 < n else LOG_ZERO
    terms = []
    for l in range(j + 1):
        m = max(l, i)
        # log((vals[m] - floor) * ring_l), mass-based to survive depth
        base = log_masses[m] if l >= i else log_masses[i] + (log_rings[l] - log_rings[i])
        damp = math.log1p(-math.exp(lfloor - log_vals[m])) if lfloor > LOG_ZERO else 0.0
        terms.append(base + damp)
    log_l1 = logsumexp(terms)
    if log_l1 == LOG_ZERO:
        return LOG_ZERO
    log_linf = logdiffexp(log_vals[i], lfloor)
    log_ratio = min(0.0, log_l1 - log_linf)
    return log_l1 + phi.log_gamma_eval(log_ratio)


def grouped_log_cost(
    log_vals, log_rings, log_masses, phi, psi, strategy: str = "auto"
) -> float:
    """The same grouping search over layers carried in the log domain.

    log_vals: descending logs of the distinct values; log_rings: logs of the
    ring measures; log_masses: logs of their products, carried separately
    (see log_layer_weight).  Returns the log of the best total cost.  One
    optimizer, two number representations.
    """
    n = len(log_vals)
    weights: dict = {}

    def weight(i: int, j: int) -> float:
        key = (i, j)
        got = weights.get(key)
        if got is None:
            got = log_layer_weight(log_vals, log_rings, log_masses, i, j, phi)
            weights[key] = got
        return got

    log_psi_at = [math.log(psi.eval(float(r + 1))) for r in range(n)]

    def total(groups) -> float:
        ws = sorted((weight(i, j) for i, j in groups), reverse=True)
        return logsumexp([p + w for p, w in zip(log_psi_at, ws)])

    candidates = [[(0, n - 1)], [(k, k) for k in range(n)]]
    if strategy == "auto":
        strategy = "exhaustive" if n <= _EXHAUSTIVE_CAP else "local_search"
    if strategy == "exhaustive":
        if n > _EXHAUSTIVE_CAP:
            raise TooManyLayers(f"{n} layers exceed the exhaustive cap")
        candidates.extend(_compositions(n))
    elif strategy == "local_search":
        groups = [(k, k) for k in range(n)]
        best = total(groups)
        improved = True
        while improved and len(groups) > 1:
            improved = False
            for idx in range(len(groups) - 1):
                cand = (
                    groups[:idx]
                    + [(groups[idx][0], groups[idx + 1][1])]
                    + groups[idx + 2 :]
                )
                t = total(cand)
                if t < best:
                    groups, best = cand, t
                    improved = True
                    break
        candidates.append(groups)

    return min(total(groups) for groups in candidates)
