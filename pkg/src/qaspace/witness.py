"""Extremal step functions that force the decomposition quasi-norm upward.

Starting from a measure mu_1 and a growth constant, the builder iterates

    gamma(mu_{j+1}) = (N^3 psi(N) / psi(1))^{1/c} * gamma(mu_j)

for 2N steps and attaches heights a_j = 1/(2N phi(mu_j)).  The resulting
function has Lorentz norm about 1 while its decomposition quasi-norm is at
least (2^c - 1)/8 * psi(N), so the family separates the two scales as N grows.

With stock shape families the measures fall below every representable float
within a few steps, so the sequence is built and evaluated entirely in the
log domain; materializing an actual step function is offered only for
shallow instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import stepfn
from .errors import DomainError, IllegalSpec, NotInvertible
from .logs import logsumexp
from .qanorm import grouped_log_cost, log_layer_weight
from .shapes import ShapeFunction, log_gamma, log_gamma_inv

__all__ = [
    "WitnessSpec",
    "WitnessFunction",
    "build_witness",
    "witness_lorentz_norm",
    "witness_qa_upper",
    "lower_bound_value",
]

_HALVING_SLACK = 1e-9
_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class WitnessSpec:
    """Parameters of the extremal construction.

    c in (0,1) and p in (0,1] are the shape hypotheses' constants; mu1 is the
    starting measure (None selects it automatically as the largest probe
    point <= p/2 where gamma certifies as strictly decreasing).
    """

    phi: ShapeFunction
    psi: ShapeFunction
    N: int
    c: float
    p: float = 1.0
    mu1: float | None = None

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 2:
            raise IllegalSpec("N must be an integer >= 2")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "p", float(self.p))
        if not 0.0 < self.c < 1.0:
            raise IllegalSpec("c must lie in (0,1)")
        if not 0.0 < self.p <= 1.0:
            raise IllegalSpec("p must lie in (0,1]")
        if self.mu1 is not None:
            mu1 = float(self.mu1)
            object.__setattr__(self, "mu1", mu1)
            if not 0.0 < mu1 <= self.p / 2.0:
                raise IllegalSpec("mu1 must lie in (0, p/2]")
        growth = (self.N**3) * self.psi.eval(float(self.N))
        if growth < 2.0 * self.psi.eval(1.0):
            raise IllegalSpec("need N^3 psi(N) >= 2 psi(1) for a well-defined sequence")

    def log_growth(self) -> float:
        """(1/c) * log(N^3 psi(N)/psi(1)), the log-gamma step per index."""
        return (
            3.0 * math.log(self.N)
            + math.log(self.psi.eval(float(self.N)))
            - math.log(self.psi.eval(1.0))
        ) / self.c


@dataclass(frozen=True)
class WitnessFunction:
    """The built extremal function, stored as (log mu_j, log a_j) pairs.

    log_mu decreases (each step at least halves the measure), log_a increases,
    and log_a[j] = -log(2N) - log(phi(mu_j)) exactly as stored.  The support
    sets are consecutive intervals packed from 0; their total measure is at
    most 2*mu1 <= 1, so only the measures are kept.

    log_gamma holds the recurrence targets log(phi(mu_j)/mu_j).  They stay
    moderate while log_mu runs off to -1e17 and beyond, and at that depth
    log_a[j] rounds to exactly -log_mu[j], so the layer's mass
    a_j * mu_j = 1/(2N gamma(mu_j)) is recoverable only through them.
    """

    log_mu: tuple
    log_a: tuple
    log_gamma: tuple
    N: int
    c: float
    p: float

    def __post_init__(self):
        n2 = 2 * self.N
        if any(len(arr) != n2 for arr in (self.log_mu, self.log_a, self.log_gamma)):
            raise IllegalSpec("witness needs exactly 2N layers")

    def to_json(self) -> dict:
        return {
            "log_mu": list(self.log_mu),
            "log_a": list(self.log_a),
            "log_gamma": list(self.log_gamma),
            "N": self.N,
            "c": self.c,
            "p": self.p,
        }

    def to_step_function(self) -> stepfn.StepFunction:
        """Materialize as an actual step function, intervals packed from 0.

        Only possible while every mu_j and a_j fits in a float; deep
        constructions raise DomainError and must stay in the log domain.
        """
        mus = [math.exp(lm) for lm in self.log_mu]
        try:
            heights = [math.exp(la) for la in self.log_a]
        except OverflowError:
            heights = [math.inf]
        if min(mus) == 0.0 or math.inf in heights:
            raise DomainError("witness values exceed the float range; keep it in log form")
        bps = [Fraction(0)]
        for m in mus:
            bps.append(bps[-1] + Fraction(m))
        values = list(heights)
        if bps[-1] < 1:
            bps.append(Fraction(1))
            values.append(0.0)
        return stepfn.StepFunction(tuple(bps), tuple(values))


def _certify_gamma_decreasing(phi: ShapeFunction, log_t: float) -> bool:
    """3-point probe: gamma strictly increases as t shrinks from exp(log_t)."""
    h = math.log(2.0)
    g = [log_gamma(phi, log_t - k * h) for k in range(3)]
    return g[0] < g[1] - 1e-12 and g[1] < g[2] - 1e-12


def _resolve_log_mu1(spec: WitnessSpec) -> float:
    if spec.mu1 is not None:
        lm = math.log(spec.mu1)
        if not _certify_gamma_decreasing(spec.phi, lm):
            raise NotInvertible("gamma is not strictly decreasing at mu1")
        return lm
    half = math.log(spec.p) - math.log(2.0)
    for k in range(200):
        lm = half - k * math.log(2.0)
        if _certify_gamma_decreasing(spec.phi, lm):
            return lm
    raise NotInvertible("no probe point <= p/2 certifies gamma as decreasing")


def build_witness(spec: WitnessSpec) -> WitnessFunction:
    """Iterate the measure recurrence for 2N steps, in log-gamma coordinates.

    The growth constant stays moderate even when log mu_j reaches -1e90 or
    so, which is why the iteration lives on log gamma values and only inverts
    back per index.
    """
    phi, psi, n2 = spec.phi, spec.psi, 2 * spec.N
    step = spec.log_growth()
    if step < math.log(2.0) / spec.c - 1e-12:
        raise IllegalSpec("growth below the halving threshold")

    log_mu = [_resolve_log_mu1(spec)]
    lg1 = log_gamma(phi, log_mu[0])
    log_g = [lg1]
    for j in range(1, n2):
        target = lg1 + j * step
        lm = log_gamma_inv(phi, target, log_hi=log_mu[-1])
        if lm > log_mu[-1] - math.log(2.0) + _HALVING_SLACK:
            raise NotInvertible("measure sequence failed to halve; gamma too flat")
        residual = abs(log_gamma(phi, lm) - target) / max(1.0, abs(target))
        if residual > _RESIDUAL_TOL:
            raise NotInvertible(f"recurrence residual {residual:.3e} out of tolerance")
        log_mu.append(lm)
        log_g.append(target)

    norm = math.log(2.0 * spec.N)
    log_a = [-norm - phi.log_eval(lm) for lm in log_mu]
    if any(not b > a for a, b in zip(log_a, log_a[1:])):
        raise NotInvertible("heights failed to increase; phi not monotone on the range")
    return WitnessFunction(
        tuple(log_mu), tuple(log_a), tuple(log_g), spec.N, spec.c, spec.p
    )


def _descending_layers(w: WitnessFunction):
    """(log values desc, log ring measures, log layer masses) of the function.

    The mass of layer j is a_j * mu_j = 1/(2N gamma(mu_j)), formed from the
    stored gamma targets; summing the stored logs instead loses it entirely
    once they exceed 1e16 or so.
    """
    log_vals = list(reversed(w.log_a))
    log_rings = list(reversed(w.log_mu))
    norm = math.log(2.0 * w.N)
    log_masses = [-norm - lg for lg in reversed(w.log_gamma)]
    return log_vals, log_rings, log_masses


def witness_lorentz_norm(w: WitnessFunction, phi: ShapeFunction) -> float:
    """Lorentz norm of the built function: sum over layers of the level
    height times phi of the tail measure, assembled with log-sum-exp.

    Uses the same per-layer weight as the log-domain grouping search, so the
    psi == 1 decomposition value coincides with this bit for bit.
    """
    log_vals, log_rings, log_masses = _descending_layers(w)
    terms = [
        log_layer_weight(log_vals, log_rings, log_masses, k, k, phi)
        for k in range(len(log_vals))
    ]
    return math.exp(logsumexp(terms))


def witness_qa_upper(
    w: WitnessFunction,
    phi: ShapeFunction,
    psi: ShapeFunction,
    strategy: str = "auto",
) -> float:
    """Best layer-grouping upper bound on the decomposition quasi-norm of the
    built function, computed in the log domain."""
    log_vals, log_rings, log_masses = _descending_layers(w)
    return math.exp(
        grouped_log_cost(log_vals, log_rings, log_masses, phi, psi, strategy=strategy)
    )


def lower_bound_value(spec: WitnessSpec) -> float:
    """(2^c - 1)/8 * psi(N), the proven floor under the quasi-norm of the
    witness built from the spec."""
    return (2.0**spec.c - 1.0) / 8.0 * spec.psi.eval(float(spec.N))
