"""The beta p-quantile q(a) as a function of the first shape parameter.

The root finder works in ``psi = -log q`` throughout. That keeps full
relative precision both when q underflows (a -> 0) and when 1 - q is tiny
(a -> infinity), which is where the limits of ``phi = a * psi`` live.
"""

import math
from dataclasses import dataclass

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import ConvergenceError, DomainError
from .incbeta import BetaParams, ibeta_parts, ibeta_psi, log_beta

__all__ = [
    "QuantileResult",
    "ToleranceConfig",
    "quantile",
    "quantile_wrt_b",
    "phi",
    "psi",
    "exp_form_density",
    "log_exp_form_density",
]

_EPS = 2.220446049250313e-16
_MAX_EXPANSIONS = 2100


@dataclass(frozen=True)
class QuantileResult:
    """Solution of I(q; a, b) = p.

    ``q`` may underflow to 0.0 for very small ``a``; ``psi`` (= -log q) is
    always finite and is the primary output. ``bracket_width`` is the size
    of the final enclosing interval measured in q.
    """

    q: float
    psi: float
    residual: float
    iterations: int
    bracket_width: float

    @property
    def log_q(self):
        return -self.psi

    @property
    def one_minus_q(self):
        return -math.expm1(-self.psi)


def _log_deriv_scale(a, b, lb, psi):
    # d I(exp(-psi)) / d psi = -x f(x) = -exp(-a psi + (b-1) log(1-x) - log B)
    return math.exp(-a * psi + (b - 1.0) * math.log(-math.expm1(-psi)) - lb)


def _solve_psi(a, b, p, tol):
    """Safeguarded Newton for g(psi) = I(exp(-psi); a, b) - p, decreasing in psi."""
    lb = log_beta(a, b)

    def g(s):
        return ibeta_psi(a, b, s) - p

    guess = math.log1p(b / a)  # -log of the mean a / (a + b)
    g0 = g(guess)
    if g0 == 0.0:
        return guess, 0.0, 0, 0.0

    # geometric bracket expansion; lo has g > 0, hi has g < 0
    if g0 > 0:
        lo, hi = guess, guess * 2.0
        for _ in range(_MAX_EXPANSIONS):
            if g(hi) < 0:
                break
            lo, hi = hi, hi * 2.0
        else:
            raise ConvergenceError("upper psi bracket expansion failed", bracket=(lo, hi))
    else:
        lo, hi = guess * 0.5, guess
        for _ in range(_MAX_EXPANSIONS):
            if g(lo) > 0:
                break
            lo, hi = lo * 0.5, lo
            if lo == 0.0:
                raise ConvergenceError("lower psi bracket expansion failed", bracket=(lo, hi))
        else:
            raise ConvergenceError("lower psi bracket expansion failed", bracket=(lo, hi))

    s = min(max(guess, lo), hi)
    gs = g(s)
    iterations = 0
    while True:
        if gs == 0.0:
            break
        if iterations >= tol.max_newton_iters:
            raise ConvergenceError(
                f"quantile iteration cap reached (a={a}, b={b}, p={p})", bracket=(lo, hi)
            )
        iterations += 1
        if gs > 0:
            lo = s
        else:
            hi = s
        slope = _log_deriv_scale(a, b, lb, s)
        s_new = s + gs / slope if slope > 0 else math.nan
        if abs(s_new - s) <= 2.0 * _EPS * s:
            # Newton has stalled at rounding level; keep the better endpoint
            if lo <= s_new <= hi and s_new != s:
                g_new = g(s_new)
                if abs(g_new) < abs(gs):
                    s, gs = s_new, g_new
            break
        if not lo < s_new < hi:
            s_new = math.sqrt(lo * hi) if hi > 4.0 * lo else 0.5 * (lo + hi)
            if not lo < s_new < hi:
                break
        s = s_new
        gs = g(s)
    if gs > 0:
        lo = max(lo, s)
    elif gs < 0:
        hi = min(hi, s)
    return s, abs(gs), iterations, hi - lo


def _bracket_in_q(psi_value, width):
    # q-width of [psi, psi + width] mapped through exp(-psi)
    return math.exp(-psi_value) * -math.expm1(-width)


def quantile(params, tol=DEFAULT_TOL):
    """Solve I(q; a, b) = p for q."""
    s, residual, iterations, width = _solve_psi(params.a, params.b, params.p, tol)
    if residual > tol.quantile_abs_tol:
        raise ConvergenceError(
            f"quantile residual {residual:.3e} exceeds {tol.quantile_abs_tol:.1e} "
            f"(a={params.a}, b={params.b}, p={params.p})"
        )
    return QuantileResult(
        q=math.exp(-s),
        psi=s,
        residual=residual,
        iterations=iterations,
        bracket_width=_bracket_in_q(s, width),
    )


def psi(a, b, p, tol=DEFAULT_TOL):
    """-log q(a)."""
    return quantile(BetaParams(a, b, p), tol).psi


def phi(a, b, p, tol=DEFAULT_TOL):
    """-a log q(a)."""
    return a * psi(a, b, p, tol)


def quantile_wrt_b(a, b, p, tol=DEFAULT_TOL):
    """q_p(a, b) computed as 1 - q_{1-p}(b, a).

    The reflected solve yields ``r = q_{1-p}(b, a)`` through its own psi, so
    ``1 - r = -expm1(-psi_r)`` carries full relative precision.
    """
    params = BetaParams(a, b, p)
    mirror = quantile(BetaParams(b, a, 1.0 - p), tol)
    x = mirror.one_minus_q
    y = math.exp(-mirror.psi)
    if x == 0.0:
        raise DomainError("reflected quantile is indistinguishable from 1")
    log_x = math.log(x)
    residual = abs(ibeta_parts(params.a, params.b, x, y, log_x, -mirror.psi) - params.p)
    return QuantileResult(
        q=x,
        psi=-log_x,
        residual=residual,
        iterations=mirror.iterations,
        bracket_width=mirror.bracket_width,
    )


def log_exp_form_density(a, b, s):
    if not s > 0:
        raise DomainError(f"s must be positive, got {s!r}")
    return -s + (b - 1.0) * math.log(-math.expm1(-s / a))


def exp_form_density(a, b, s):
    """e^{-s} (1 - e^{-s/a})^{b-1}, the integrand after substituting t = e^{-s/a}."""
    return math.exp(log_exp_form_density(a, b, s))
