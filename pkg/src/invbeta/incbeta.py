"""Regularised incomplete beta function I(x; a, b)."""

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

_FPMIN = 1e-300
_CF_EPS = 2.220446049250313e-16
CF_MAX_ITER = 500


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters ``a``, ``b`` and quantile level ``p``."""

    a: float
    b: float
    p: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError(f"a must be positive and finite, got {self.a!r}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise DomainError(f"b must be positive and finite, got {self.b!r}")
        if not 0 < self.p < 1:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")


def _check_shapes(a, b):
    if not (a > 0 and b > 0):
        raise DomainError(f"shape parameters must be positive, got a={a!r}, b={b!r}")


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_STIRLING_MIN = 15.0


def _stirling_corr(x):
    # lgamma(x) - [(x - 1/2) log x - x + log(2 pi)/2], valid for x >= 15
    inv = 1.0 / x
    inv2 = inv * inv
    return inv * (
        1.0 / 12 - inv2 * (1.0 / 360 - inv2 * (1.0 / 1260 - inv2 * (1.0 / 1680 - inv2 / 1188)))
    )


def log_beta(a, b):
    """log B(a, b).

    For large arguments the lgamma terms are combined analytically so that
    their leading parts cancel exactly instead of in floating point.
    """
    _check_shapes(a, b)
    small, big = (a, b) if a <= b else (b, a)
    if big < _STIRLING_MIN:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    total = small + big
    corr = _stirling_corr(big) - _stirling_corr(total)
    if small < _STIRLING_MIN:
        # lgamma(small) + [lgamma(big) - lgamma(big + small)]
        return (
            math.lgamma(small)
            - (big - 0.5) * math.log1p(small / big)
            - small * math.log(total)
            + small
            + corr
        )
    return (
        _HALF_LOG_2PI
        - 0.5 * math.log(big)
        - (small - 0.5) * math.log1p(big / small)
        - big * math.log1p(small / big)
        + _stirling_corr(small)
        + corr
    )


def _betacf(a, b, x, max_iter=CF_MAX_ITER):
    """Modified Lentz evaluation of the incomplete beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= _CF_EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def _rlog1(u, log1pu=None):
    """u - log(1 + u), accurate for small |u|.

    ``log1pu`` supplies log(1 + u) when 1 + u is known better through logs
    than through u itself (u rounds to -1 for a tiny first argument).
    """
    if abs(u) > 0.5:
        return u - (math.log1p(u) if log1pu is None else log1pu)
    r = u / (2.0 + u)
    r2 = r * r
    # log1p(u) = 2 atanh(r) and u - 2r = u^2 / (2 + u)
    term = r * r2
    acc = 0.0
    k = 3
    while True:
        piece = term / k
        acc += piece
        if abs(piece) <= 1e-17 * abs(acc):
            break
        term *= r2
        k += 2
    return u * u / (2.0 + u) - 2.0 * acc


def _front(a, b, x, y, log_x, log_y):
    """x^a (1-x)^b / (a B(a, b)).

    When both shapes are large the exponent is expanded about the mean
    a / (a + b), where the first-order terms cancel exactly.
    """
    if a >= _STIRLING_MIN and b >= _STIRLING_MIN and x > 0.0 and y > 0.0:
        t = a + b
        delta = (x * b - y * a) / t
        u = delta * t / a
        v = -delta * t / b
        corr = _stirling_corr(a) + _stirling_corr(b) - _stirling_corr(t)
        return math.sqrt(a * b / (2.0 * math.pi * t)) * math.exp(
            -corr
            - a * _rlog1(u, log_x + math.log(t / a))
            - b * _rlog1(v, log_y + math.log(t / b))
        ) / a
    return math.exp(a * log_x + b * log_y - log_beta(a, b) - math.log(a))


def ibeta_parts(a, b, x, y, log_x, log_y):
    """I(x; a, b) from a consistent quadruple ``x``, ``y = 1 - x`` and their logs.

    Callers that know ``1 - x`` or the logarithms more accurately than ``x``
    itself (for instance when ``x = exp(-psi)`` underflows) pass them here.
    """
    if log_x == -math.inf:
        return 0.0
    if log_y == -math.inf:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return _front(a, b, x, y, log_x, log_y) * _betacf(a, b, x)
    return 1.0 - _front(b, a, y, x, log_y, log_x) * _betacf(b, a, y)


def ibeta_psi(a, b, psi):
    """I(exp(-psi); a, b), accurate when exp(-psi) is near 0 or 1."""
    if psi == math.inf:
        return 0.0
    if psi == 0:
        return 1.0
    y = -math.expm1(-psi)
    return ibeta_parts(a, b, math.exp(-psi), y, -psi, math.log(y))


def reg_inc_beta(x, a, b):
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    _check_shapes(a, b)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    return ibeta_parts(a, b, x, 1.0 - x, math.log(x), math.log1p(-x))


def reg_inc_beta_complement(x, a, b):
    """1 - I(x; a, b) without cancellation."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    return reg_inc_beta(1.0 - x, b, a) if x >= 0.5 else 1.0 - reg_inc_beta(x, a, b)


def reflect(x, a, b):
    """Evaluate I(x; a, b) through the reflected form 1 - I(1 - x; b, a)."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    return 1.0 - reg_inc_beta(1.0 - x, b, a)


def log_beta_density(x, a, b):
    """log of the beta density x^(a-1) (1-x)^(b-1) / B(a, b)."""
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_beta(a, b)
