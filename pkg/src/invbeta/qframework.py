"""Monotone-ratio and quantile lemmas checked on discretised densities.

A density family f(a, x) on an interval J is sampled on a fixed
double-exponential grid. Integrals become weighted sums, CDFs come from the
cumulative trapezoid rule, and quantiles from piecewise-linear inversion, so
every statement about integrals in a reduces to arithmetic on node values.

The lemmas are conditional. Before certifying a conclusion each check
verifies the hypotheses on the grid (monotonicity in x of d/da log f, and
of u/v) and reports ``inconclusive`` when they fail.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import DomainError
from .report import FAIL, INCONCLUSIVE, PASS, CheckRecord, VerificationReport

HYPOTHESIS_TOL = 1e-12
TRUNCATION_RATIO = 1e-16
DEFAULT_STEP = 1.0 / 64.0
_DE_RANGE = 6.5

INCREASING = "increasing"
DECREASING = "decreasing"
CONSTANT = "constant"


@dataclass(frozen=True)
class DensityFamily:
    """Unnormalised positive density f(a, x) on an open interval.

    ``density`` and the optional callables take a scalar ``a`` and an array
    of points. Without ``log_deriv_a`` the derivative of log f in a is taken
    by central differences.
    """

    domain: tuple
    density: Callable
    log_deriv_a: Optional[Callable] = None
    log_density: Optional[Callable] = None
    name: str = "family"

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise DomainError(f"empty domain {self.domain!r}")

    def log_f(self, a, x):
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            if self.log_density is not None:
                return np.asarray(self.log_density(a, x), dtype=float)
            return np.log(np.asarray(self.density(a, x), dtype=float))

    def values(self, a, x):
        # far grid nodes may overflow intermediate terms; the density is 0 there
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            if self.log_density is not None:
                return np.exp(self.log_f(a, x))
            return np.asarray(self.density(a, x), dtype=float)

    def dlog_da(self, a, x, rel_step=1e-5):
        if self.log_deriv_a is not None:
            return np.asarray(self.log_deriv_a(a, x), dtype=float)
        h = rel_step * max(abs(a), 1.0)
        return (self.log_f(a + h, x) - self.log_f(a - h, x)) / (2.0 * h)


@dataclass(frozen=True)
class DiscretizedMeasure:
    """Nodes and weights with sum(w * f(nodes)) approximating int f.

    ``weights`` are the trapezoid weights of a uniform grid in an auxiliary
    variable, times the Jacobian of the map to x.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.nodes.ndim != 1 or self.nodes.shape != self.weights.shape:
            raise DomainError("nodes and weights must be 1-d arrays of equal length")
        if self.nodes.size < 2 or np.any(np.diff(self.nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if not np.all(np.isfinite(self.weights)):
            raise DomainError("weights must be finite")

    @classmethod
    def for_domain(cls, domain, step=DEFAULT_STEP):
        """Double-exponential grid suited to the kind of interval.

        tanh-sinh for a bounded interval, exp-sinh for a half line and
        sinh-sinh for the real line; nodes that round onto an endpoint or
        onto their neighbour are dropped.
        """
        lo, hi = (float(e) for e in domain)
        u = np.arange(-_DE_RANGE, _DE_RANGE + 0.5 * step, step)
        s = 0.5 * math.pi * np.sinh(u)
        ds = 0.5 * math.pi * np.cosh(u)
        with np.errstate(over="ignore"):
            if math.isfinite(lo) and math.isfinite(hi):
                # lo + width * expit(2s) keeps the distance to lo exact
                width = hi - lo
                left, right = special.expit(2.0 * s), special.expit(-2.0 * s)
                x = np.where(s < 0, lo + width * left, hi - width * right)
                jac = 2.0 * width * ds * left * right
            elif math.isfinite(lo):
                x = lo + np.exp(s)
                jac = np.exp(s) * ds
            elif math.isfinite(hi):
                x = hi - np.exp(-s)[::-1]
                jac = (np.exp(-s) * ds)[::-1]
            else:
                x = np.sinh(s)
                jac = np.cosh(s) * ds
        keep = np.isfinite(x) & np.isfinite(jac) & (x > lo) & (x < hi) & (jac > 0)
        x, jac = x[keep], jac[keep]
        strict = np.concatenate([[True], np.diff(x) > 0])
        return cls(nodes=x[strict], weights=step * jac[strict])

    def integrate(self, values):
        return float(np.sum(self.weights * values))

    def cumulative(self, values):
        """Trapezoid partial integrals from the first node to each node."""
        g = self.weights * values
        return np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]))])


@dataclass
class DiscreteQuantile:
    q: float
    truncated_mass: float
    bracket: tuple
    interpolation_bound: float = field(default=math.nan)


def _monotone_direction(values, tol=HYPOTHESIS_TOL):
    """Direction of a sampled function, or None if it is not monotone.

    Consecutive differences within ``tol`` (relative to the sample scale)
    count as ties. Infinite entries are allowed.
    """
    finite = values[np.isfinite(values)]
    scale = max(1.0, float(np.max(np.abs(finite)))) if finite.size else 1.0
    with np.errstate(invalid="ignore"):
        d = np.diff(values)
    d = np.where(np.isnan(d), 0.0, d)  # inf - inf: equal infinities
    slack = tol * scale
    up = np.all(d >= -slack)
    down = np.all(d <= slack)
    if up and down:
        return CONSTANT
    if up:
        return INCREASING
    if down:
        return DECREASING
    return None


def _is_strict(values, direction):
    d = np.diff(values)
    if direction == INCREASING:
        return bool(np.all(d > 0))
    if direction == DECREASING:
        return bool(np.all(d < 0))
    return False


def _log_deriv_direction(family, measure, a_grid):
    directions = set()
    strict = True
    for a in a_grid:
        vals = family.dlog_da(a, measure.nodes)
        direction = _monotone_direction(vals)
        if direction is None:
            return None, False
        directions.add(direction)
        strict = strict and _is_strict(vals, direction)
    if len(directions - {CONSTANT}) > 1:
        return None, False
    non_constant = directions - {CONSTANT}
    return (non_constant.pop() if non_constant else CONSTANT), strict


def _lemma_prediction(log_deriv_dir, ratio_dir):
    if log_deriv_dir is None or ratio_dir is None:
        return None
    if CONSTANT in (log_deriv_dir, ratio_dir):
        return CONSTANT
    return INCREASING if log_deriv_dir == ratio_dir else DECREASING


def _sequence_violation(values, direction, strict):
    """Largest step against ``direction``; strictness demands every step signed."""
    d = np.diff(np.asarray(values, dtype=float))
    if direction == CONSTANT:
        return float(np.max(np.abs(d))) if d.size else 0.0
    sign = 1.0 if direction == INCREASING else -1.0
    worst = float(np.max(-sign * d)) if d.size else -math.inf
    if strict:
        return worst if worst >= 0 else 0.0
    return max(worst, 0.0)


def _strict_ok(values, direction, tol=HYPOTHESIS_TOL):
    """Every step strictly signed, except between values that are both zero
    at grid tolerance (typically underflowed tails)."""
    values = np.asarray(values, dtype=float)
    d = np.diff(values)
    sign = 1.0 if direction == INCREASING else -1.0
    floor = tol * float(np.max(np.abs(values)))
    negligible = np.maximum(np.abs(values[1:]), np.abs(values[:-1])) <= floor
    return bool(np.all((sign * d > 0) | negligible))


def ratio_monotonicity_check(family, u, v, a_grid, measure=None, tol=1e-12):
    """Monotonicity of F(a) = int f u / int f v predicted from the hypotheses.

    Same monotonicity of d/da log f and u/v in x gives F increasing, opposite
    gives F decreasing. Nodes where u and v both vanish are left out.
    """
    measure = measure or DiscretizedMeasure.for_domain(family.domain)
    x = measure.nodes
    uu = np.asarray(u(x), dtype=float) * np.ones_like(x)
    vv = np.asarray(v(x), dtype=float) * np.ones_like(x)
    if np.any(uu < 0) or np.any(vv < 0):
        raise DomainError("u and v must be non-negative")
    support = (uu > 0) | (vv > 0)
    if not np.any(support):
        raise DomainError("u and v vanish on every node")
    sub = DiscretizedMeasure(x[support], measure.weights[support])
    uu, vv = uu[support], vv[support]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(vv > 0, uu / vv, np.inf)
    ratio_dir = _monotone_direction(ratio)
    ld_dir, ld_strict = _log_deriv_direction(family, sub, a_grid)
    predicted = _lemma_prediction(ld_dir, ratio_dir)

    values = []
    for a in a_grid:
        f = family.values(a, sub.nodes)
        values.append(sub.integrate(f * uu) / sub.integrate(f * vv))
    params = {"family": family.name, "a_min": float(min(a_grid)), "a_max": float(max(a_grid))}
    witness = {
        "log_deriv_direction": ld_dir,
        "ratio_direction": ratio_dir,
        "predicted": predicted,
        "F": [float(x) for x in values],
    }
    report = VerificationReport(suite="framework")
    if predicted is None:
        report.add(CheckRecord("ratio_monotonicity", params, math.nan, tol, INCONCLUSIVE, witness))
        return report
    strict = ld_strict and predicted != CONSTANT
    scale = max(abs(v) for v in values)
    violation = _sequence_violation(values, predicted, strict=False)
    ok = violation <= tol * scale and (not strict or _strict_ok(values, predicted))
    witness["strict"] = strict
    report.add(
        CheckRecord("ratio_monotonicity", params, violation, tol * scale, PASS if ok else FAIL, witness)
    )
    return report


def discretized_quantile(family, a, p, measure=None):
    """p-quantile of f(a, .) / int f(a, .) from the discretised CDF.

    Nodes whose weighted contribution w f is below ``TRUNCATION_RATIO``
    times the largest contribution are dropped from both ends, and the mass
    they carry is reported. Weighting matters: a density with an integrable
    spike at an endpoint has its maximum there but little mass.
    """
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    measure = measure or DiscretizedMeasure.for_domain(family.domain)
    f = family.values(a, measure.nodes)
    f = np.where(np.isfinite(f), f, 0.0)
    if not np.any(f > 0):
        raise DomainError(f"density of {family.name} vanishes on the grid at a={a}")
    total_mass = measure.integrate(f)
    g = measure.weights * f
    idx = np.nonzero(g >= TRUNCATION_RATIO * np.max(g))[0]
    lo, hi = idx[0], idx[-1] + 1
    if hi - lo < 2:
        raise DomainError(
            f"mass of {family.name} at a={a} sits on a single grid node; refine the measure"
        )
    kept = DiscretizedMeasure(measure.nodes[lo:hi], measure.weights[lo:hi])
    fk = f[lo:hi]
    cum = kept.cumulative(fk)
    cdf = cum / cum[-1]
    truncated = max(0.0, 1.0 - kept.integrate(fk) / total_mass)
    j = int(np.searchsorted(cdf, p))
    j = min(max(j, 1), cdf.size - 1)
    x0, x1 = kept.nodes[j - 1], kept.nodes[j]
    q = float(np.interp(p, cdf[j - 1 : j + 1], [x0, x1]))
    # linear interpolation of F on [x0, x1] errs by at most dx^2 max|f'| / 8
    slope = abs(fk[j] - fk[j - 1]) / (x1 - x0)
    density = max(0.5 * (fk[j] + fk[j - 1]) / cum[-1], 1e-300)
    bound = (x1 - x0) ** 2 * slope / cum[-1] / 8.0 / density
    return DiscreteQuantile(q=q, truncated_mass=truncated, bracket=(float(x0), float(x1)),
                            interpolation_bound=float(bound))


def quantile_monotonicity_check(family, p, a_grid, measure=None):
    """q(a) moves in the direction of the monotonicity of d/da log f in x."""
    measure = measure or DiscretizedMeasure.for_domain(family.domain)
    ld_dir, ld_strict = _log_deriv_direction(family, measure, a_grid)
    quantiles = [discretized_quantile(family, a, p, measure) for a in a_grid]
    qs = [dq.q for dq in quantiles]
    params = {
        "family": family.name,
        "p": p,
        "a_min": float(min(a_grid)),
        "a_max": float(max(a_grid)),
        "points": len(a_grid),
    }
    witness = {
        "log_deriv_direction": ld_dir,
        "q": qs,
        "max_truncated_mass": max(dq.truncated_mass for dq in quantiles),
    }
    report = VerificationReport(suite="framework")
    if ld_dir is None:
        report.add(CheckRecord("quantile_monotonicity", params, math.nan, 0.0, INCONCLUSIVE, witness))
        return report
    # a constant log-derivative means f(a, .) only changes by a factor
    resolution = max(dq.interpolation_bound for dq in quantiles)
    violation = _sequence_violation(qs, ld_dir, strict=False)
    strict = ld_strict and ld_dir != CONSTANT
    ok = violation <= (resolution if ld_dir == CONSTANT else 0.0)
    if strict:
        ok = ok and _strict_ok(qs, ld_dir)
    witness["strict"] = strict
    report.add(
        CheckRecord(
            "quantile_monotonicity", params, violation, resolution if ld_dir == CONSTANT else 0.0,
            PASS if ok else FAIL, witness,
        )
    )
    return report


@dataclass(frozen=True)
class CdfGrid:
    """A CDF sampled at increasing nodes."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.nodes.shape != self.values.shape or np.any(np.diff(self.nodes) <= 0):
            raise DomainError("CDF grid needs strictly increasing nodes and matching values")
        if np.any(np.diff(self.values) < 0):
            raise DomainError("CDF values must be non-decreasing")

    def quantile(self, p):
        """Smallest interpolated x with F(x) = p."""
        j = int(np.searchsorted(self.values, p, side="left"))
        if j == 0:
            return float(self.nodes[0])
        if j >= self.nodes.size:
            return float(self.nodes[-1])
        f0, f1 = self.values[j - 1], self.values[j]
        x0, x1 = self.nodes[j - 1], self.nodes[j]
        return float(x0 + (p - f0) / (f1 - f0) * (x1 - x0))


def quantile_convergence_check(cdf_sequence, limit, p, tol=0.0, tail=1):
    """Final p-quantiles of a CDF sequence lie in the limit's p-level interval.

    The interval [sup{F < p}, inf{F > p}] of the limit CDF is bracketed on
    its grid by the last node with F < p and the first node with F > p. If
    either does not exist the limit is at the edge of the grid and the check
    is inconclusive. The last ``tail`` quantiles of the sequence are tested.
    """
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    qs = [grid.quantile(p) for grid in cdf_sequence]
    below = np.nonzero(limit.values < p)[0]
    above = np.nonzero(limit.values > p)[0]
    params = {"p": p, "sequence_length": len(qs), "tail": tail}
    witness = {"q": qs}
    report = VerificationReport(suite="framework")
    if below.size == 0 or above.size == 0:
        report.add(CheckRecord("quantile_convergence", params, math.nan, tol, INCONCLUSIVE, witness))
        return report
    lo = float(limit.nodes[below[-1]])
    hi = float(limit.nodes[above[0]])
    witness["limit_interval"] = [lo, hi]
    last = qs[-tail:]
    miss = max(max(lo - q, q - hi, 0.0) for q in last)
    report.add(CheckRecord.compare("quantile_convergence", params, miss, tol, witness))
    return report


def cdf_grid(family, a, measure):
    """Normalised trapezoid CDF of f(a, .) on the nodes of ``measure``."""
    f = family.values(a, measure.nodes)
    f = np.where(np.isfinite(f), f, 0.0)
    cum = measure.cumulative(f)
    return CdfGrid(measure.nodes, cum / cum[-1])


# ---------------------------------------------------------------------------
# built-in families


def beta_family(b):
    """t^(a-1) (1-t)^(b-1) on (0, 1); d/da log f = log t."""

    def log_density(a, t):
        return (a - 1.0) * np.log(t) + (b - 1.0) * np.log1p(-t)

    return DensityFamily(
        domain=(0.0, 1.0),
        density=lambda a, t: np.exp(log_density(a, t)),
        log_deriv_a=lambda a, t: np.log(t),
        log_density=log_density,
        name=f"beta(b={b:g})",
    )


def exp_form_family(b):
    """e^{-s} (1 - e^{-s/a})^(b-1) on (0, inf).

    d/da log f = -(b - 1) (s / a^2) / (e^{s/a} - 1), increasing in s when
    b > 1 and decreasing when b < 1.
    """

    def log_density(a, s):
        return -s + (b - 1.0) * np.log(-np.expm1(-s / a))

    def log_deriv(a, s):
        with np.errstate(over="ignore"):
            return -(b - 1.0) * (s / a**2) / np.expm1(s / a)

    return DensityFamily(
        domain=(0.0, math.inf),
        density=lambda a, s: np.exp(log_density(a, s)),
        log_deriv_a=log_deriv,
        log_density=log_density,
        name=f"exp-form(b={b:g})",
    )


def gaussian_location_family(sigma=1.0):
    """exp(-(x - a)^2 / (2 sigma^2)); the p-quantile is a + sigma z_p."""

    def log_density(a, x):
        return -0.5 * ((x - a) / sigma) ** 2

    return DensityFamily(
        domain=(-math.inf, math.inf),
        density=lambda a, x: np.exp(log_density(a, x)),
        log_deriv_a=lambda a, x: (x - a) / sigma**2,
        log_density=log_density,
        name=f"gaussian-location(sigma={sigma:g})",
    )


def gamma_cdf_grid(shape, nodes):
    return CdfGrid(np.asarray(nodes), special.gammainc(shape, nodes))


BUILTIN_FAMILIES = {
    "beta": beta_family,
    "exp_form": exp_form_family,
    "gaussian_location": gaussian_location_family,
}


def family_from_config(config):
    """Build a family from a mapping such as ``{"family": "beta", "b": 2.5}``.

    A string is parsed as JSON first. The ``family`` key selects one of
    ``BUILTIN_FAMILIES``; the remaining keys are passed as keyword arguments.
    """
    if isinstance(config, str):
        config = json.loads(config)
    config = dict(config)
    kind = config.pop("family", None)
    if kind not in BUILTIN_FAMILIES:
        raise DomainError(f"unknown family {kind!r}; choose from {sorted(BUILTIN_FAMILIES)}")
    try:
        return BUILTIN_FAMILIES[kind](**config)
    except TypeError as exc:
        raise DomainError(f"bad parameters for family {kind!r}: {exc}") from None
