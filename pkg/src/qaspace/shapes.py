"""Parametrized concave shape functions and their calculus.

Two kinds of shapes appear throughout the toolkit:

* phi-kind: non-decreasing on [0,1], zero at 0, with phi(t)/t non-increasing
  (quasiconcave).  They weigh layer measures.
* psi-kind: non-decreasing on [0, inf), zero at 0.  They weigh positions in a
  decomposition, evaluated at any real argument >= 0.

Families (JSON `family` tag in parentheses):

* alpha_beta(a, b): t^a * (1 + log(1/t))^b, flattened to the constant
  e^{a-b} (b/a)^b above min{1, e^{1-b/a}} so it stays non-decreasing.
* qa_phi: t * log(e/t), the a = b = 1 profile.
* psi_gamma(g): t below 1, (1 + log t)^g above.
* qa_psi: the g = 1 profile, 1 + log t above 1.
* identity, constant_one: the two degenerate ends (constant_one jumps at 0).
* piecewise: linear interpolation through concave sample points.

`log_eval` evaluates log(shape(e^x)) directly from x = log t, exact to
relative 1e-12 down to x = -1e9 and far beyond for the analytic families;
deep arguments like these arise from the extremal construction.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from itertools import product

from .errors import (
    DomainError,
    EmptyInput,
    IllegalSpec,
    NotInvertible,
    SpecParseError,
    UnsupportedFamily,
)

__all__ = [
    "ShapeFunction",
    "AssumptionReport",
    "alpha_beta",
    "psi_gamma",
    "qa_phi",
    "qa_psi",
    "identity",
    "constant_one",
    "piecewise",
    "gamma",
    "log_gamma",
    "gamma_inv",
    "log_gamma_inv",
    "least_concave_majorant",
    "is_concave",
    "is_quasiconcave",
    "check_assumptions",
    "parse_shape",
    "shape_to_json",
]

_FAMILIES = ("alpha_beta", "psi_gamma", "qa_phi", "qa_psi", "identity", "constant_one", "piecewise")


@dataclass(frozen=True)
class ShapeFunction:
    """One member of a shape family; immutable and hashable."""

    family: str
    alpha: float | None = None
    beta: float | None = None
    exponent: float | None = None
    points: tuple | None = None
    domain_kind: str = "phi"

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise IllegalSpec(f"unknown family {self.family!r}")
        if self.domain_kind not in ("phi", "psi"):
            raise IllegalSpec("domain_kind must be 'phi' or 'psi'")
        if self.family == "alpha_beta":
            a, b = self.alpha, self.beta
            if a is None or b is None or not (0 < a <= 1) or not (0 <= b <= 1):
                raise IllegalSpec("alpha_beta needs alpha in (0,1], beta in [0,1]")
        elif self.family == "psi_gamma":
            g = self.exponent
            if g is None or not (0 <= g <= 1):
                raise IllegalSpec("psi_gamma needs exponent in [0,1]")
        elif self.family == "piecewise":
            pts = self.points
            if not pts:
                raise IllegalSpec("piecewise needs sample points")
            pts = tuple((float(t), float(y)) for t, y in pts)
            object.__setattr__(self, "points", pts)
            if pts[0] != (0.0, 0.0):
                raise IllegalSpec("piecewise samples must start at (0, 0)")
            ts = [t for t, _ in pts]
            ys = [y for _, y in pts]
            if any(not tb > ta for ta, tb in zip(ts, ts[1:])):
                raise IllegalSpec("piecewise sample abscissae must strictly increase")
            if any(y < 0 for y in ys):
                raise IllegalSpec("piecewise samples must be non-negative")
            if any(yb < ya for ya, yb in zip(ys, ys[1:])):
                raise IllegalSpec("piecewise samples must be non-decreasing")
            if not is_concave(pts):
                raise IllegalSpec("piecewise samples must be concave")
            if self.domain_kind == "phi" and ts[-1] > 1.0:
                raise IllegalSpec("phi-kind piecewise samples must stay within [0,1]")

    # threshold above which the alpha_beta formula is replaced by its max;
    # with beta = 0 the formula is increasing everywhere and never flattens
    def _flat_log_t(self) -> float:
        if not self.beta:
            return math.inf
        return 1.0 - self.beta / self.alpha

    def zero_limit(self) -> float:
        """Limit from the right at 0 (nonzero only for constant_one)."""
        return 1.0 if self.family == "constant_one" else 0.0

    def _check_domain(self, t: float):
        if t < 0 or not math.isfinite(t):
            raise DomainError(f"argument {t!r} outside domain")
        if self.domain_kind == "phi" and t > 1:
            raise DomainError(f"phi-kind shapes live on [0,1], got {t!r}")

    def eval(self, t: float) -> float:
        t = float(t)
        self._check_domain(t)
        fam = self.family
        if t == 0.0:
            return 0.0
        if fam == "identity":
            return t
        if fam == "constant_one":
            return 1.0
        if fam == "qa_phi":
            return t * (1.0 - math.log(t))
        if fam == "alpha_beta":
            lt = math.log(t)
            if lt >= self._flat_log_t():
                b_over_a = self.beta / self.alpha
                return math.exp(self.alpha - self.beta) * b_over_a**self.beta
            return t**self.alpha * (1.0 - lt) ** self.beta
        if fam in ("psi_gamma", "qa_psi"):
            g = 1.0 if fam == "qa_psi" else self.exponent
            if t < 1.0:
                return t
            return (1.0 + math.log(t)) ** g
        # piecewise
        ts = [p[0] for p in self.points]
        if t > ts[-1]:
            raise DomainError(f"piecewise shape sampled only up to {ts[-1]}, got {t!r}")
        i = bisect_right(ts, t) - 1
        if i == len(ts) - 1:
            return self.points[-1][1]
        (t0, y0), (t1, y1) = self.points[i], self.points[i + 1]
        return y0 + (y1 - y0) * (t - t0) / (t1 - t0)

    __call__ = eval

    def log_eval(self, log_t: float) -> float:
        """log(self(exp(log_t))), stable for arbitrarily deep log_t."""
        fam = self.family
        if self.domain_kind == "phi" and log_t > 0.0:
            raise DomainError("phi-kind shapes live on [0,1]")
        if fam == "identity":
            return log_t
        if fam == "constant_one":
            return 0.0
        if fam == "qa_phi":
            return log_t + math.log(1.0 - log_t)
        if fam == "alpha_beta":
            if log_t >= self._flat_log_t():
                b_over_a = self.beta / self.alpha
                return (self.alpha - self.beta) + self.beta * math.log(b_over_a)
            out = self.alpha * log_t
            if self.beta:
                out += self.beta * math.log(1.0 - log_t)
            return out
        if fam in ("psi_gamma", "qa_psi"):
            g = 1.0 if fam == "qa_psi" else self.exponent
            if log_t < 0.0:
                return log_t
            return g * math.log1p(log_t) if g else 0.0
        # piecewise: only meaningful at or above the first positive sample
        first_pos = next((t for t, _ in self.points if t > 0), None)
        if first_pos is None or log_t < math.log(first_pos):
            raise UnsupportedFamily("piecewise shapes cannot be evaluated below their samples")
        return math.log(self.eval(math.exp(log_t)))

    def log_gamma_eval(self, log_t: float) -> float:
        """log(self(t)/t) at t = exp(log_t), formed per family.

        Never computed as log_eval(log_t) - log_t: once |log_t| dwarfs the
        ratio's log, that subtraction cancels to zero and the ratio is lost.
        """
        fam = self.family
        if self.domain_kind == "phi" and log_t > 0.0:
            raise DomainError("phi-kind shapes live on [0,1]")
        if fam == "identity":
            return 0.0
        if fam == "constant_one":
            return -log_t
        if fam == "qa_phi":
            return math.log(1.0 - log_t)
        if fam == "alpha_beta":
            if log_t >= self._flat_log_t():
                b_over_a = self.beta / self.alpha
                return (self.alpha - self.beta) + self.beta * math.log(b_over_a) - log_t
            out = (self.alpha - 1.0) * log_t
            if self.beta:
                out += self.beta * math.log(1.0 - log_t)
            return out
        if fam in ("psi_gamma", "qa_psi"):
            g = 1.0 if fam == "qa_psi" else self.exponent
            if log_t < 0.0:
                return 0.0
            return (g * math.log1p(log_t) if g else 0.0) - log_t
        return self.log_eval(log_t) - log_t

    def to_json(self) -> dict:
        return shape_to_json(self)


def alpha_beta(alpha: float, beta: float) -> ShapeFunction:
    return ShapeFunction("alpha_beta", alpha=float(alpha), beta=float(beta))


def psi_gamma(exponent: float) -> ShapeFunction:
    return ShapeFunction("psi_gamma", exponent=float(exponent), domain_kind="psi")


def qa_phi() -> ShapeFunction:
    return ShapeFunction("qa_phi")


def qa_psi() -> ShapeFunction:
    return ShapeFunction("qa_psi", domain_kind="psi")


def identity(kind: str = "phi") -> ShapeFunction:
    return ShapeFunction("identity", domain_kind=kind)


def constant_one(kind: str = "phi") -> ShapeFunction:
    return ShapeFunction("constant_one", domain_kind=kind)


def piecewise(points, kind: str = "phi") -> ShapeFunction:
    return ShapeFunction("piecewise", points=tuple(points), domain_kind=kind)


def gamma(shape: ShapeFunction, t: float) -> float:
    """shape(t)/t, the per-measure cost of an indicator of measure t."""
    t = float(t)
    if not 0 < t <= 1:
        raise DomainError("gamma needs t in (0, 1]")
    return shape.eval(t) / t


def log_gamma(shape: ShapeFunction, log_t: float) -> float:
    return shape.log_gamma_eval(log_t)


_EXPAND_LIMIT = 1.0e308


def log_gamma_inv(shape: ShapeFunction, target: float, log_hi: float = 0.0) -> float:
    """Solve log_gamma(shape, x) == target for x <= log_hi by bisection.

    log_gamma must be strictly decreasing on the bracket; a flat probe raises
    NotInvertible.  Accuracy: the bracket is shrunk to width
    1e-12 + 4*eps*|x|, so the answer is exact to a few ulp even when
    |x| is astronomically large.
    """
    g_hi = log_gamma(shape, log_hi)
    if target < g_hi:
        raise NotInvertible(f"target {target!r} below attainable minimum {g_hi!r}")
    if target == g_hi:
        if log_gamma(shape, log_hi - 1.0) <= g_hi:
            raise NotInvertible("shape(t)/t is not strictly decreasing here")
        return log_hi
    offset = 1.0
    lo = log_hi - offset
    while log_gamma(shape, lo) < target:
        offset *= 2.0
        if offset > _EXPAND_LIMIT:
            raise NotInvertible(f"target {target!r} not reached within float range")
        lo = log_hi - offset
    hi = log_hi
    mid = 0.5 * (lo + hi)
    if not log_gamma(shape, lo) > log_gamma(shape, mid) > g_hi:
        raise NotInvertible("shape(t)/t is not strictly decreasing on the bracket")
    while (hi - lo) > 1e-12 + 4.0 * math.ulp(abs(mid)):
        if log_gamma(shape, mid) >= target:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
    return mid


def gamma_inv(shape: ShapeFunction, y: float) -> float:
    """Inverse of t -> shape(t)/t on (0, 1]."""
    y = float(y)
    if y <= 0 or not math.isfinite(y):
        raise DomainError("gamma_inv needs a finite positive target")
    return math.exp(log_gamma_inv(shape, math.log(y)))


def least_concave_majorant(samples) -> ShapeFunction:
    """Smallest concave function above the samples, as a piecewise shape.

    Samples must start at (0, 0) with strictly increasing abscissae in [0,1].
    The result is the upper convex hull, so it touches the samples and is
    linear in between.
    """
    pts = [(float(t), float(y)) for t, y in samples]
    if not pts:
        raise EmptyInput("no samples")
    if pts[0] != (0.0, 0.0):
        raise IllegalSpec("samples must start at (0, 0)")
    ts = [t for t, _ in pts]
    if any(not b > a for a, b in zip(ts, ts[1:])) or ts[-1] > 1.0:
        raise IllegalSpec("sample abscissae must strictly increase within [0,1]")
    if any(y < 0 for _, y in pts):
        raise IllegalSpec("samples must be non-negative")
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            cross = (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox)
            if cross >= 0:  # middle point at or below the chord
                hull.pop()
            else:
                break
        hull.append(p)
    return piecewise(tuple(hull))


def is_concave(samples, tol: float = 1e-12) -> bool:
    """Finite check: chord slopes non-increasing left to right."""
    pts = [(float(t), float(y)) for t, y in samples]
    slopes = [
        (y1 - y0) / (t1 - t0) for (t0, y0), (t1, y1) in zip(pts, pts[1:])
    ]
    for s0, s1 in zip(slopes, slopes[1:]):
        if s1 > s0 + tol * max(1.0, abs(s0)):
            return False
    return True


def is_quasiconcave(samples, tol: float = 1e-12) -> bool:
    """Finite check: zero at 0, positive after, non-decreasing, y/t non-increasing."""
    pts = [(float(t), float(y)) for t, y in samples]
    ratios = []
    for t, y in pts:
        if t == 0.0:
            if y != 0.0:
                return False
            continue
        if y <= 0:
            return False
        ratios.append(y / t)
    ys = [y for _, y in pts]
    for y0, y1 in zip(ys, ys[1:]):
        if y1 < y0 - tol * max(1.0, abs(y0)):
            return False
    for r0, r1 in zip(ratios, ratios[1:]):
        if r1 > r0 * (1.0 + tol):
            return False
    return True


@dataclass(frozen=True)
class AssumptionReport:
    """Grid evidence for the growth assumptions behind the lower-bound machinery.

    phi_ratio_monotone: phi(t)/t^c never decreased along the grid in (0, p].
    psi_square_constant: empirical max of psi(n^2)/psi(n) over tested n.
    The flags are evidence on the stated finite grids, not proofs.
    """

    c: float
    p: float
    phi_ratio_monotone: bool
    psi_square_constant: float
    psi_square_bounded: bool
    grid: tuple


def _ratio_monotone_on_grid(phi: ShapeFunction, c: float, p: float, points: int) -> tuple:
    # log-spaced grid over nine decades up to p; monotonicity read off in logs
    log_p = math.log(p)
    lo = log_p + math.log(1e-9)
    grid = [math.exp(lo + (log_p - lo) * i / (points - 1)) for i in range(points)]
    grid[-1] = p
    h = [phi.log_eval(math.log(t)) - c * math.log(t) for t in grid]
    ok = all(h1 >= h0 - 1e-10 for h0, h1 in zip(h, h[1:]))
    return ok, tuple(grid)


def check_assumptions(
    phi: ShapeFunction,
    psi: ShapeFunction,
    c_candidates,
    p_candidates,
    n_max: int = 256,
    grid_points: int = 1000,
) -> AssumptionReport:
    """Test the two growth assumptions on finite grids and report the best pair.

    For each candidate (c, p), phi(t)/t^c is sampled on a 10^3-point log grid
    in (0, p]; the best passing pair maximizes c, then p.  The psi constant is
    the empirical max of psi(n^2)/psi(n) for n up to n_max.
    """
    cs = sorted(set(float(c) for c in c_candidates), reverse=True)
    ps = sorted(set(float(p) for p in p_candidates), reverse=True)
    if not cs or not ps:
        raise ValueError("need at least one candidate for c and for p")
    if any(not 0 < c < 1 for c in cs) or any(not 0 < p <= 1 for p in ps):
        raise ValueError("candidates need c in (0,1), p in (0,1]")
    if n_max < 4:
        raise ValueError("n_max must be at least 4")

    best = None
    best_grid = None
    passed = False
    for c, p in product(cs, ps):
        ok, grid = _ratio_monotone_on_grid(phi, c, p, grid_points)
        if ok:
            best, best_grid, passed = (c, p), grid, True
            break  # candidates are scanned best first
    if best is None:
        best = (cs[0], ps[0])
        _, best_grid = _ratio_monotone_on_grid(phi, *best, grid_points)

    ratios = [psi.eval(float(n * n)) / psi.eval(float(n)) for n in range(1, n_max + 1)]
    constant = max(ratios)
    return AssumptionReport(
        c=best[0],
        p=best[1],
        phi_ratio_monotone=passed,
        psi_square_constant=constant,
        psi_square_bounded=math.isfinite(constant),
        grid=best_grid,
    )


_KIND_DEFAULT = {
    "alpha_beta": "phi",
    "qa_phi": "phi",
    "psi_gamma": "psi",
    "qa_psi": "psi",
    "identity": "phi",
    "constant_one": "phi",
    "piecewise": "phi",
}


def parse_shape(obj, expected_kind: str | None = None) -> ShapeFunction:
    """Build a ShapeFunction from its JSON object form.

    expected_kind ('phi' or 'psi') fixes the domain for the families that can
    serve as either; a conflicting explicit "domain" key is rejected.
    """
    if not isinstance(obj, dict):
        raise SpecParseError("shape spec must be an object")
    family = obj.get("family")
    if family not in _FAMILIES:
        raise SpecParseError(f"unknown shape family {family!r}")
    allowed = {"family", "domain"}
    params: dict = {}
    if family == "alpha_beta":
        allowed |= {"alpha", "beta"}
        params["alpha"] = obj.get("alpha")
        params["beta"] = obj.get("beta")
    elif family == "psi_gamma":
        allowed |= {"gamma"}
        params["exponent"] = obj.get("gamma")
    elif family == "piecewise":
        allowed |= {"points"}
        params["points"] = obj.get("points")
    extra = set(obj) - allowed
    if extra:
        raise SpecParseError(f"unknown keys for {family}: {sorted(extra)}")
    kind = obj.get("domain", expected_kind or _KIND_DEFAULT[family])
    if expected_kind is not None and obj.get("domain") not in (None, expected_kind):
        raise SpecParseError(f"shape domain {obj['domain']!r} conflicts with expected {expected_kind!r}")
    try:
        if family == "alpha_beta":
            return ShapeFunction("alpha_beta", alpha=float(params["alpha"]), beta=float(params["beta"]), domain_kind=kind)
        if family == "psi_gamma":
            return ShapeFunction("psi_gamma", exponent=float(params["exponent"]), domain_kind=kind)
        if family == "piecewise":
            pts = tuple((float(t), float(y)) for t, y in params["points"])
            return ShapeFunction("piecewise", points=pts, domain_kind=kind)
        return ShapeFunction(family, domain_kind=kind)
    except (IllegalSpec, TypeError, ValueError) as exc:
        raise SpecParseError(f"bad {family} spec: {exc}") from exc


def shape_to_json(shape: ShapeFunction) -> dict:
    out: dict = {"family": shape.family}
    if shape.family == "alpha_beta":
        out["alpha"] = shape.alpha
        out["beta"] = shape.beta
    elif shape.family == "psi_gamma":
        out["gamma"] = shape.exponent
    elif shape.family == "piecewise":
        out["points"] = [[t, y] for t, y in shape.points]
    if shape.domain_kind != _KIND_DEFAULT[shape.family]:
        out["domain"] = shape.domain_kind
    return out
