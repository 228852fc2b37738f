"""Exact series and integral identities around psi(a) = -log q(a).

The central quantity is the ratio integral

    Y_c(psi) = int_0^psi e^{ct} (1 - e^{-t})^(b-1) dt / (e^{c psi} (1 - e^{-psi})^(b-1)),

always evaluated in the overflow-free form

    Y_c(psi) = int_0^psi e^{-cv} g(v) dv,   g(v) = ((1 - e^{v-psi}) / (1 - e^{-psi}))^(b-1).

Its derivative in a is

    psi'(a) = sum_n Y_{n+b}(psi) / (a+b+n) - sum_n Y_n(psi) / (a+n),

summed here over the paired terms T_n so that the O(1/n) parts cancel. The
paired terms decay like n^-3; the default summation adds an Euler-Maclaurin
tail whose integral part has a closed kernel in terms of E1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize, special

from ._quad import integrate_exp_kernel, measure
from .config import DEFAULT_TOL
from .errors import ConvergenceError, DomainError, TruncationError
from .gammafns import digamma
from .incbeta import BetaParams, _stirling_corr, log_beta
from .quantile import quantile

__all__ = [
    "WRootResult",
    "SeriesDiagnostics",
    "w_eval",
    "w_prime",
    "find_rho",
    "h0_eval",
    "eta_eval",
    "eta_integral_identity",
    "Y",
    "Y_t_route",
    "psi_prime_series",
    "q_prime_series",
    "alt_binom",
    "sum1_check",
    "sum2_check",
    "hyper1_check",
]

_SERIES_X = 1.0  # below this w and w' are summed from their Taylor series
_FIRST_BLOCK = 32


# ---------------------------------------------------------------------------
# the exponential polynomial w and its relatives


@dataclass(frozen=True)
class WRootResult:
    """Positive root of w with the location of its maximum."""

    rho: float
    w_max_location: float
    bracket: tuple


@dataclass(frozen=True)
class SeriesDiagnostics:
    terms_used: int
    tail_estimate: float
    converged: bool


def _w_taylor_tail(x):
    # sum_{k>=3} (k - 2) x^k / (2 k!)
    term = x**3 / 6.0
    acc = 0.0
    k = 3
    while True:
        piece = 0.5 * (k - 2) * term
        acc += piece
        if piece <= 1e-17 * acc:
            return acc
        k += 1
        term *= x / k


def w_eval(x, b):
    """w(x) = (1 - x/2) e^x + (b - 1) x / 2 - 1."""
    if not x >= 0:
        raise DomainError(f"w is defined for x >= 0, got {x!r}")
    if x < _SERIES_X:
        # the constant and quadratic terms cancel exactly
        return 0.5 * b * x - _w_taylor_tail(x)
    return (1.0 - 0.5 * x) * math.exp(x) + 0.5 * (b - 1.0) * x - 1.0


def w_prime(x, b):
    if not x >= 0:
        raise DomainError(f"w is defined for x >= 0, got {x!r}")
    if x < _SERIES_X:
        # b/2 - sum_{k>=2} (k - 1) x^k / (2 k!)
        term = 0.5 * x * x
        acc = 0.0
        k = 2
        while True:
            piece = 0.5 * (k - 1) * term
            acc += piece
            if piece <= 1e-17 * acc:
                break
            k += 1
            term *= x / k
        return 0.5 * b - acc
    return 0.5 * (1.0 - x) * math.exp(x) + 0.5 * (b - 1.0)


def _w_scaled(x, b):
    # e^{-2x} w(x), finite for every x >= 0
    if x < 30.0:
        return math.exp(-2.0 * x) * w_eval(x, b)
    return (1.0 - 0.5 * x) * math.exp(-x) + (0.5 * (b - 1.0) * x - 1.0) * math.exp(-2.0 * x)


def find_rho(b):
    """Unique positive root of w.

    w is concave (w'' = -x e^x / 2), starts at 0 with slope b/2, so it rises
    to a single maximum and then falls to -infinity.
    """
    if not (b > 0 and math.isfinite(b)):
        raise DomainError(f"b must be positive, got {b!r}")
    hi = 1.0
    while w_prime(hi, b) > 0:
        hi *= 2.0
    x_max = optimize.brentq(w_prime, 0.0, hi, args=(b,), xtol=1e-300, rtol=8.9e-16)
    lo = x_max
    hi = max(2.0 * x_max, 1.0)
    while w_eval(hi, b) >= 0:
        lo, hi = hi, 2.0 * hi
    rho = optimize.brentq(w_eval, lo, hi, args=(b,), xtol=1e-300, rtol=8.9e-16)
    if abs(w_eval(rho, b)) > 1e-12:
        raise ConvergenceError(f"|w(rho)| = {abs(w_eval(rho, b)):.2e}", bracket=(lo, hi))
    if not (w_eval(0.5 * rho, b) > 0 and w_eval(2.0 * rho, b) < 0):
        raise ConvergenceError("w does not change sign at the computed root", bracket=(lo, hi))
    return WRootResult(rho=rho, w_max_location=x_max, bracket=(lo, hi))


def h0_eval(s, b):
    """s w(s) / (e^s - 1)^2, extended by b/2 at s = 0."""
    if s < 0:
        raise DomainError(f"s must be non-negative, got {s!r}")
    if s == 0:
        return 0.5 * b
    return s * _w_scaled(s, b) / math.expm1(-s) ** 2


def eta_eval(x, b):
    """x e^{-2x} (1 - e^{-x})^(b-3) w(x); has the sign of w."""
    if not x > 0:
        raise DomainError(f"x must be positive, got {x!r}")
    return x * _w_scaled(x, b) * (-math.expm1(-x)) ** (b - 3.0)


def _eta_over_power(s, b):
    # eta(s) / s^(b-1), bounded on [0, 1]
    if s == 0:
        return 0.5 * b
    return math.exp(-2.0 * s) * (-math.expm1(-s) / s) ** (b - 3.0) * (w_eval(s, b) / s)


def eta_integral_identity(b, tol=DEFAULT_TOL):
    """int_0^inf eta(s) ds, which vanishes for every b > 0.

    Near zero eta ~ (b/2) s^(b-1), so [0, 1] is integrated against the
    algebraic weight s^(b-1). The integrand is regular at b = 1 and b = 2 and
    needs no special treatment there.
    """
    if not (b > 0 and math.isfinite(b)):
        raise DomainError(f"b must be positive, got {b!r}")
    head, err_head = integrate.quad(
        _eta_over_power, 0.0, 1.0, args=(b,), weight="alg", wvar=(b - 1.0, 0.0),
        epsabs=1e-15, epsrel=1e-13, limit=200,
    )
    tail, err_tail = integrate.quad(
        eta_eval, 1.0, math.inf, args=(b,), epsabs=1e-14, epsrel=1e-12, limit=200
    )
    if err_head + err_tail > tol.quad_abs_tol:
        raise ConvergenceError(f"eta quadrature error estimate {err_head + err_tail:.2e}")
    return head + tail


# ---------------------------------------------------------------------------
# Y_c(psi)


def _check_y_args(c, psi, b):
    if not c >= 0:
        raise DomainError(f"c must be non-negative, got {c!r}")
    if not psi > 0:
        raise DomainError(f"psi must be positive, got {psi!r}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")


def Y(c, psi, b, tol=DEFAULT_TOL):
    """Y_c(psi) by composite Gauss rules on the stabilised form.

    The value is accepted only if a rule with twice the nodes per panel
    agrees to ``tol.quad_abs_tol`` (relative to max(1, Y)). ``c = 0`` is
    allowed and gives int_0^psi g.
    """
    _check_y_args(c, psi, b)
    coarse = integrate_exp_kernel(psi, b, [c])[0]
    fine = integrate_exp_kernel(psi, b, [c], legendre_nodes=24, jacobi_nodes=40)[0]
    if abs(coarse - fine) > tol.quad_abs_tol * max(1.0, abs(fine)):
        raise ConvergenceError(f"Y quadrature rules disagree by {abs(coarse - fine):.2e}")
    return float(fine)


def Y_t_route(c, psi, b, tol=DEFAULT_TOL):
    """Y_c(psi) from the original variable t = e^{-s}.

    Y_c = (1/q) int_q^1 (q/t)^(c+1) ((1 - t)/(1 - q))^(b-1) dt with q = e^{-psi},
    integrated adaptively by QUADPACK; the algebraic endpoint at t = 1 is
    carried by an explicit weight. Kept independent of ``Y`` on purpose.
    """
    _check_y_args(c, psi, b)
    if psi > 700.0:
        raise DomainError("t-route needs q = exp(-psi) to be a normal double")
    q = math.exp(-psi)
    log_1mq = math.log(-math.expm1(-psi))
    k = c + 1.0

    def plain(t):
        return math.exp(k * (-psi - math.log(t)) + (b - 1.0) * (math.log1p(-t) - log_1mq) + psi)

    def weighted(t):
        # (1 - t)^(b-1) is supplied by the quadrature weight
        return math.exp(k * (-psi - math.log(t)) - (b - 1.0) * log_1mq + psi)

    split = max(q, 0.5)
    total = 0.0
    abserr = 0.0
    if split > q:
        # geometric pieces so that (q/t)^(c+1) drops by at most e^8 per piece
        ratio = math.exp(min(8.0 / k, 8.0))
        edges = [q]
        while edges[-1] * ratio < split and len(edges) < 400:
            edges.append(edges[-1] * ratio)
        edges.append(split)
        for lo, hi in zip(edges[:-1], edges[1:]):
            val, err = integrate.quad(plain, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
            total += val
            abserr += err
            if val < 1e-18 * total:
                break
    val, err = integrate.quad(
        weighted, split, 1.0, weight="alg", wvar=(0.0, b - 1.0),
        epsabs=0.0, epsrel=1e-13, limit=200,
    )
    total += val
    abserr += err
    if abserr > tol.quad_abs_tol * max(1.0, total):
        raise ConvergenceError(f"t-route quadrature error estimate {abserr:.2e}")
    return total


# ---------------------------------------------------------------------------
# psi'(a)


def _scaled_exp1(x):
    """e^x E1(x) for x > 0, without overflow."""
    x = np.asarray(x, dtype=float)
    small = x <= 50.0
    out = np.empty_like(x)
    xs = x[small]
    out[small] = np.exp(xs) * special.exp1(xs)
    xl = x[~small]
    # even part of the classical continued fraction, ample for x > 50
    t = xl + 41.0
    for k in range(20, 0, -1):
        t = xl + 2.0 * k - 1.0 - k * k / t
    out[~small] = 1.0 / t
    return out


def _tail_integral(a, b, psi, m):
    """int_m^inf T(s) ds with T continued to real s.

    Swapping the order of integration gives
    int_0^psi g(v) e^{av} [E1((m+a+b) v) - E1((m+a) v)] dv.
    """
    c1 = m + a + b
    c2 = m + a
    v, w = measure(psi, b, [m], inner=c2)
    keep = w[0] > 0  # zero-width panels can sit at v = 0 where E1 diverges
    v, w = v[0][keep], w[0][keep]
    kernel = np.exp(-(m + b) * v) * _scaled_exp1(c1 * v) - np.exp(-m * v) * _scaled_exp1(c2 * v)
    return float(np.sum(w * kernel))


def _paired_terms_v(a, b, psi, lo, hi):
    n = np.arange(lo, hi, dtype=float)
    y = integrate_exp_kernel(psi, b, np.concatenate([n + b, n]))
    k = n.size
    return y[:k] / (a + b + n) - y[k:] / (a + n)


def _paired_terms_t(a, b, psi, lo, hi, tol):
    out = []
    for n in range(lo, hi):
        out.append(
            Y_t_route(n + b, psi, b, tol) / (a + b + n) - Y_t_route(float(n), psi, b, tol) / (a + n)
        )
    return np.array(out)


def _em_estimate(terms, n_cut, tail):
    """Explicit terms below ``n_cut`` plus the midpoint Euler-Maclaurin tail."""
    t0, t1, t2, t3 = terms[n_cut - 2 : n_cut + 2]
    d1 = (t0 - 27.0 * t1 + 27.0 * t2 - t3) / 24.0
    d3 = t3 - 3.0 * t2 + 3.0 * t1 - t0
    correction = d1 / 24.0 - 7.0 * d3 / 5760.0
    return math.fsum(terms[:n_cut]) + tail + correction, abs(7.0 * d3 / 5760.0)


def _accelerated_sum(term_block, tail_at, tol):
    terms = term_block(0, 2 * _FIRST_BLOCK + 2)
    n_cut = _FIRST_BLOCK
    previous, _ = _em_estimate(terms, n_cut, tail_at(n_cut - 0.5))
    while True:
        n_next = 2 * n_cut
        if n_next + 2 > tol.series_max_terms:
            raise TruncationError(
                f"series not converged within {tol.series_max_terms} terms",
                bracket=(previous, previous),
            )
        if terms.size < n_next + 2:
            terms = np.concatenate([terms, term_block(terms.size, n_next + 2)])
        value, _ = _em_estimate(terms, n_next, tail_at(n_next - 0.5))
        rel = abs(value - previous) / abs(value) if value != 0 else abs(value - previous)
        if rel <= tol.series_tail_tol:
            return value, SeriesDiagnostics(n_next + 2, rel, True)
        previous, n_cut = value, n_next


def _plain_sum(term_block, tail_at, tol, block=256):
    """Direct partial sums, stopped after five consecutive negligible terms."""
    chunks = []
    running = 0.0
    quiet = 0
    n = 0
    while n < tol.series_max_terms:
        chunk = term_block(n, min(n + block, tol.series_max_terms))
        chunks.append(chunk)
        for i, t in enumerate(chunk):
            running += t
            quiet = quiet + 1 if abs(t) < tol.series_tail_tol * abs(running) else 0
            if quiet >= 5:
                used = n + i + 1
                value = math.fsum(np.concatenate(chunks)[:used])
                bound = abs(tail_at(used - 0.5)) / abs(value)
                return value, SeriesDiagnostics(used, bound, bound <= tol.series_tail_tol)
        n += chunk.size
    raise TruncationError(f"series not converged within {tol.series_max_terms} terms")


def _psi_prime_from_psi(a, b, psi_value, tol, accelerate=True):
    def block(lo, hi):
        return _paired_terms_v(a, b, psi_value, lo, hi)

    def tail_at(m):
        return _tail_integral(a, b, psi_value, m)

    if accelerate:
        return _accelerated_sum(block, tail_at, tol)
    return _plain_sum(block, tail_at, tol)


def psi_prime_series(a, b, p, tol=DEFAULT_TOL, accelerate=True):
    """d psi / da from the paired Y-series.

    Returns ``(value, SeriesDiagnostics)``. With ``accelerate=False`` the
    terms are summed directly and the diagnostics carry an integral bound on
    the discarded tail.
    """
    params = BetaParams(a, b, p)
    psi_value = quantile(params, tol).psi
    return _psi_prime_from_psi(a, b, psi_value, tol, accelerate)


def q_prime_series(a, b, p, tol=DEFAULT_TOL):
    """dq/da from the ratio integrals in the original variable t.

    Each ratio int_q^1 t^(-c-1) (1-t)^(b-1) dt / (q^(-c-1) (1-q)^(b-1)) equals
    q Y_c(psi); the paired combination of those ratios therefore sums to
    q psi' = -q'. Terms come from ``Y_t_route``; the Euler-Maclaurin tail is
    shared with ``psi_prime_series``.
    """
    params = BetaParams(a, b, p)
    res = quantile(params, tol)

    def block(lo, hi):
        return res.q * _paired_terms_t(a, b, res.psi, lo, hi, tol)

    def tail_at(m):
        return res.q * _tail_integral(a, b, res.psi, m)

    ratio_sum, _ = _accelerated_sum(block, tail_at, tol)
    return -ratio_sum


# ---------------------------------------------------------------------------
# binomial sums


def _is_integer(b):
    return b == math.floor(b)


def alt_binom(b, k):
    """(-1)^k C(b - 1, k) = (1 - b)_k / k!."""
    if k < 0 or k != int(k):
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    return float((-1) ** int(k) * special.binom(b - 1.0, k))


def _coeffs(b, count):
    # (1 - b)_k / k! for k < count by the exact ratio recurrence
    out = np.empty(count)
    c = 1.0
    for k in range(count):
        out[k] = c
        c *= (k + 1.0 - b) / (k + 1.0)
    return out


def _log_gamma_ratio(x, b):
    """log Gamma(x - b) - log Gamma(x) without cancellation for large x."""
    y = x - b
    if y < 15.0:
        return math.lgamma(y) - math.lgamma(x)
    return (
        (y - 0.5) * math.log1p(-b / x) - b * math.log(x) + b + _stirling_corr(y) - _stirling_corr(x)
    )


def _coeff_continuous(s, b):
    """(1 - b)_s / s! for real s > b - 1 and its log-derivative."""
    log_mag = _log_gamma_ratio(s + 1.0, b) - special.gammaln(1.0 - b)
    sign = float(special.gammasgn(1.0 - b))
    return sign * math.exp(log_mag), digamma(s + 1.0 - b) - digamma(s + 1.0)


def _em_tail(f, dlog_f, start, decay):
    """sum_{k >= start} f(k) by Euler-Maclaurin at the left end.

    ``f(s)`` must fall at least like s^-(1 + decay).
    """
    # s = start e^u turns algebraic decay into exponential decay
    integral, _ = integrate.quad(
        lambda u: f(start * math.exp(u)) * start * math.exp(u),
        0.0, min(40.0 / decay, 600.0), epsabs=0.0, epsrel=1e-13, limit=400,
    )
    f0 = f(start)
    return integral + 0.5 * f0 - f0 * dlog_f(start) / 12.0


def _coeff_series(b, weight, dlog_weight, head, exclude=None):
    """sum_k (1 - b)_k / k! * weight(k), explicit for k < head then an EM tail."""
    coeffs = _coeffs(b, head)
    pieces = [coeffs[k] * weight(k) for k in range(head) if k != exclude]

    def f(s):
        return _coeff_continuous(s, b)[0] * weight(s)

    def dlog_f(s):
        return _coeff_continuous(s, b)[1] + dlog_weight(s)

    return math.fsum(pieces) + _em_tail(f, dlog_f, head, b)


def _pochhammer_slope(b_int, k):
    """d/db of (1 - b)_k / k! at an integer b <= k, as an exact fraction."""
    prod = Fraction(1)
    for j in range(k):
        if j != b_int - 1:
            prod *= j + 1 - b_int
    return -prod / math.factorial(k)


def _exact_coeff(b_int, k):
    prod = Fraction(1)
    for j in range(k):
        prod *= j + 1 - b_int
    return prod / math.factorial(k)


_SUM_HEAD = 2000


def sum1_check(n, b, tol=DEFAULT_TOL):
    """|sum_k (-1)^k C(b-1, k) / (n + b - k)|, which should vanish.

    For integer b the sum is finite except for the removable 0/0 term at
    k = n + b, which contributes its limit d/db (1-b)_k / k!; the total is
    then exactly 0 in rational arithmetic.
    """
    if n < 0 or n != int(n):
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    n = int(n)
    if _is_integer(b):
        bi = int(b)
        total = sum(_exact_coeff(bi, k) / (n + bi - k) for k in range(bi))
        total += _pochhammer_slope(bi, n + bi)
        return abs(float(total))
    head = max(_SUM_HEAD, n + 10)
    value = _coeff_series(
        b,
        lambda s: 1.0 / (n + b - s),
        lambda s: 1.0 / (n + b - s),
        head,
    )
    return abs(value)


def _bracket_sum(n, b, head):
    # sum_{k != n} (1/(k-n) - 1/(k+b-n)) = sum over j >= -n, j != 0 of b / (j (j + b))
    pieces = [1.0 / j - 1.0 / (j + b) for j in range(-n, head) if j != 0]
    integral = math.log1p(b / head)  # int_head^inf b / (s (s + b)) ds

    def f(s):
        return b / (s * (s + b))

    f0 = f(head)
    return math.fsum(pieces) + integral + 0.5 * f0 + f0 * (1.0 / head + 1.0 / (head + b)) / 12.0


def sum2_check(n, b, tol=DEFAULT_TOL):
    """|LHS - RHS| for the second binomial identity.

    LHS = sum_{k != n} (-1)^k C(b-1, k) / (k - n),
    RHS = -(-1)^n C(b-1, n) (sum_{k != n} (1/(k-n) - 1/(k+b-n)) - 1/b).
    Integer b is handled exactly; when n >= b the right side is the limit of
    a vanishing coefficient times a pole.
    """
    if n < 0 or n != int(n):
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    n = int(n)
    if _is_integer(b):
        bi = int(b)
        lhs = sum(_exact_coeff(bi, k) / (k - n) for k in range(bi) if k != n)
        if n < bi:
            inner = sum(Fraction(1, j) for j in range(-n, bi - n) if j != 0)
            rhs = -_exact_coeff(bi, n) * inner
        else:
            rhs = _pochhammer_slope(bi, n)
        return abs(float(lhs - rhs))
    head = max(_SUM_HEAD, n + 10)
    lhs = _coeff_series(
        b,
        lambda s: 1.0 / (s - n),
        lambda s: -1.0 / (s - n),
        head,
        exclude=n,
    )
    rhs = -_coeffs(b, n + 1)[n] * (_bracket_sum(n, b, head) - 1.0 / b)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# the hypergeometric form of the defining equation

_HYPER_HEAD = 4096
_KAPPA_LIMIT = 1e4


def _hyper_sum_mp(a, b, psi_value, kappa):
    # sum_n (1-b)_n q^n / ((a+n) n!) = 2F1(1 - b, a; a + 1; q) / a
    import mpmath as mp

    with mp.workdps(30 + int(math.log10(max(kappa, 1.0)))):
        a_ = mp.mpf(a)
        q = mp.exp(-mp.mpf(psi_value))
        return mp.hyp2f1(1 - mp.mpf(b), a_, a_ + 1, q) / a_


def hyper1_check(a, b, p, tol=DEFAULT_TOL):
    """Relative residual of q^a sum_n (1-b)_n q^n / ((a+n) n!) = p B(a, b).

    Terms are summed in double precision while the sum is well conditioned.
    With heavy cancellation the sum is redone as mpmath's 2F1 at a precision
    raised by log10 of the condition number.
    """
    params = BetaParams(a, b, p)
    psi_value = quantile(params, tol).psi
    rhs_log = math.log(p) + log_beta(a, b)
    count = int(b) if _is_integer(b) else _HYPER_HEAD
    coeffs = _coeffs(b, count)
    k = np.arange(count, dtype=float)
    terms = coeffs * np.exp(-k * psi_value) / (a + k)
    total = math.fsum(terms)
    kappa = math.fsum(np.abs(terms)) / abs(total)
    if not _is_integer(b):
        last = abs(terms[-1])
        if last > 1e-16 * abs(total):
            # slowly decaying tail, q close to 1
            def f(s):
                return _coeff_continuous(s, b)[0] * math.exp(-s * psi_value) / (a + s)

            def dlog_f(s):
                return _coeff_continuous(s, b)[1] - psi_value - 1.0 / (a + s)

            total += _em_tail(f, dlog_f, count, b)
    if kappa > _KAPPA_LIMIT:
        total = float(_hyper_sum_mp(a, b, psi_value, kappa))
    if not total > 0:
        raise ConvergenceError("hypergeometric sum lost all precision")
    return abs(math.expm1(-a * psi_value + math.log(total) - rhs_log))
