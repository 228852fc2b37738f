import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invbeta.config import DEFAULT_TOL
from invbeta.errors import ConvergenceError, DomainError, TruncationError
from invbeta.quantile import psi
from invbeta.series import (
    Y,
    Y_t_route,
    _scaled_exp1,
    alt_binom,
    eta_eval,
    eta_integral_identity,
    find_rho,
    h0_eval,
    hyper1_check,
    psi_prime_series,
    q_prime_series,
    sum1_check,
    sum2_check,
    w_eval,
    w_prime,
)

# d psi / da by mpmath differentiation of a 40-digit bisection solve
PSI_PRIME_ORACLE = [
    (2.0, 3.0, 0.5, -0.3630169108915628),
    (0.5, 1.5, 0.9, -0.702887236663594),
    (0.05, 0.3, 0.1, -916.7530767003065),
    (50.0, 7.0, 0.5, -0.002383717251174171),
    (1.0, 0.5, 0.5, -0.3488320958430319),
]

# Y_c(psi) by mpmath quadrature after d = (psi - v)^b removes the endpoint
Y_ORACLE = [
    (0.0, 1.0, 0.5, 1.7253416345624982645),
    (1.0, 0.3, 1.5, 0.182911564295853951),
    (4.0, 2.0, 3.0, 0.22591781621983670299),
    (0.5, 10.0, 7.0, 1.9413362413649196488),
    (25.0, 5.0, 0.3, 0.04000791823558159567),
]

# positive root of (1 - x/2) e^x + (b - 1) x / 2 - 1, by bisection
RHO_ORACLE = [
    (0.5, 1.2446783921622725326),
    (1.0, 1.5936242600400400923),
    (3.0, 2.2628101291969146103),
]


def fd_psi_prime(a, b, p, rel=1e-4):
    h = rel * a
    return (psi(a + h, b, p) - psi(a - h, b, p)) / (2 * h)


@pytest.mark.parametrize("a,b,p,expected", PSI_PRIME_ORACLE)
def test_psi_prime_oracle(a, b, p, expected):
    value, diag = psi_prime_series(a, b, p)
    assert value == pytest.approx(expected, rel=1e-10)
    assert diag.converged


@pytest.mark.parametrize("a", [0.01, 0.3, 1.0, 10.0, 1000.0])
@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_psi_prime_b1_closed_form(a, p):
    value, _ = psi_prime_series(a, 1.0, p)
    assert value == pytest.approx(-math.log(1 / p) / a**2, rel=1e-12)


@given(
    a=st.floats(0.05, 200.0),
    b=st.sampled_from([0.3, 0.5, 0.9, 1.0, 1.5, 2.5, 7.0]),
    p=st.floats(0.05, 0.95),
)
def test_psi_prime_matches_differences(a, b, p):
    value, _ = psi_prime_series(a, b, p)
    assert value < 0
    assert abs(value - fd_psi_prime(a, b, p)) <= 1e-5 * abs(value)


def test_q_prime_is_minus_q_psi_prime():
    for a, b, p in [(2.0, 3.0, 0.5), (0.5, 1.5, 0.9), (7.0, 0.4, 0.2)]:
        q = math.exp(-psi(a, b, p))
        series, _ = psi_prime_series(a, b, p)
        assert q_prime_series(a, b, p) == pytest.approx(-q * series, rel=1e-12)
        assert q_prime_series(a, b, p) > 0


def test_plain_sum_reports_its_bound():
    exact = -math.log(1 / 0.5) / 2.0**2
    value, diag = psi_prime_series(2.0, 1.0, 0.5, accelerate=False)
    assert diag.tail_estimate > 0
    assert abs(value - exact) <= 2 * diag.tail_estimate + 1e-15
    fast, _ = psi_prime_series(2.0, 3.0, 0.5)
    slow, diag = psi_prime_series(2.0, 3.0, 0.5, accelerate=False)
    assert abs(fast - slow) <= 2 * diag.tail_estimate + 1e-12 * abs(fast)


def test_plain_sum_gives_up_for_slow_terms():
    with pytest.raises(TruncationError):
        psi_prime_series(100.0, 7.0, 0.9, accelerate=False)


@pytest.mark.parametrize("c,x,b,expected", Y_ORACLE)
def test_y_oracle(c, x, b, expected):
    assert Y(c, x, b) == pytest.approx(expected, rel=1e-12)
    assert Y_t_route(c, x, b) == pytest.approx(expected, rel=1e-10)


def test_y_b1_closed_form():
    # g = 1 when b = 1
    for c, x in [(0.5, 2.0), (3.0, 0.1), (10.0, 40.0)]:
        assert Y(c, x, 1.0) == pytest.approx(-math.expm1(-c * x) / c, rel=1e-13)


@given(
    c=st.floats(0.0, 50.0),
    x=st.floats(0.01, 40.0),
    b=st.floats(0.2, 10.0),
)
def test_y_routes_agree(c, x, b):
    assert Y(c, x, b) == pytest.approx(Y_t_route(c, x, b), rel=1e-9)


@given(c=st.floats(0.1, 20.0), x=st.floats(0.05, 30.0), b=st.floats(1.05, 10.0), f=st.floats(1.01, 2.0))
def test_y_monotone_for_b_above_one(c, x, b, f):
    assert Y(c, x * f, b) >= Y(c, x, b) - 1e-12
    assert Y(c * f, x, b) <= Y(c, x, b) + 1e-12


def test_y_domain():
    with pytest.raises(DomainError):
        Y(-1.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        Y(1.0, 0.0, 2.0)
    with pytest.raises(DomainError):
        Y_t_route(1.0, 800.0, 2.0)


def test_scaled_exp1_against_mpmath():
    xs = np.array([1e-8, 0.1, 1.0, 10.0, 49.9, 50.1, 100.0, 1e3, 1e6])
    with mp.workdps(40):
        exact = [float(mp.e**x * mp.e1(x)) for x in xs]
    assert np.allclose(_scaled_exp1(xs), exact, rtol=1e-14, atol=0)


@pytest.mark.parametrize("b,expected", RHO_ORACLE)
def test_find_rho_oracle(b, expected):
    root = find_rho(b)
    assert root.rho == pytest.approx(expected, rel=1e-14)
    assert 0 < root.w_max_location < root.rho
    assert abs(w_prime(root.w_max_location, b)) < 1e-14


@given(b=st.floats(1e-6, 100.0))
def test_w_sign_pattern(b):
    rho = find_rho(b).rho
    assert w_eval(0.5 * rho, b) > 0
    assert w_eval(1.5 * rho, b) < 0


def test_w_small_argument_series():
    with mp.workdps(40):
        for x in (1e-6, 0.01, 0.5, 0.99, 1.01):
            exact = (1 - mp.mpf(x) / 2) * mp.e**x + (mp.mpf(2.5) - 1) * x / 2 - 1
            assert w_eval(x, 2.5) == pytest.approx(float(exact), rel=1e-13)


@pytest.mark.parametrize("b", [0.5, 1.0, 3.0])
def test_h0_decreasing_below_rho(b):
    rho = find_rho(b).rho
    values = [h0_eval(s, b) for s in np.linspace(0.0, rho, 101)]
    assert values[0] == 0.5 * b
    assert h0_eval(1e-9, b) == pytest.approx(0.5 * b, rel=1e-8)
    assert all(np.diff(values) < 0)


@pytest.mark.parametrize("b", [0.5, 3.0])
def test_eta_carries_sign_of_w(b):
    rho = find_rho(b).rho
    for x in np.linspace(0.05, 4 * rho, 60):
        if abs(x - rho) > 1e-3:
            assert np.sign(eta_eval(x, b)) == np.sign(w_eval(x, b))


@pytest.mark.parametrize("b", [0.3, 0.5, 1.0, 2.0, 2.5, 3.0, 3.7, 5.0, 50.0])
def test_eta_integral_identity(b):
    assert abs(eta_integral_identity(b)) <= 1e-8


@pytest.mark.parametrize("n", [0, 1, 2, 5])
@pytest.mark.parametrize("b", [0.5, 0.7, 1.5, 2.5])
def test_binomial_sums(n, b):
    assert sum1_check(n, b) <= 1e-8
    assert sum2_check(n, b) <= 1e-7


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_binomial_sums_integer_b_exact(n, b):
    assert sum1_check(n, b) == 0.0
    assert sum2_check(n, b) == 0.0


def test_alt_binom():
    assert alt_binom(2, 0) == 1.0
    assert alt_binom(2, 1) == -1.0
    assert alt_binom(3, 5) == 0.0
    assert alt_binom(2.5, 4) == pytest.approx(0.0234375, rel=1e-15)
    # (1 - b)_k / k! by the definition
    b, k = 0.3, 6
    assert alt_binom(b, k) == pytest.approx(math.prod(j - b for j in range(1, k + 1)) / math.factorial(k), rel=1e-14)
    with pytest.raises(DomainError):
        alt_binom(1.5, -1)


@pytest.mark.parametrize("a", [0.01, 0.5, 3.0, 80.0, 1000.0])
@pytest.mark.parametrize("b", [0.3, 1.0, 2.5, 7.0])
def test_hyper1(a, b):
    assert hyper1_check(a, b, 0.5) <= 1e-9


def test_hyper1_near_one():
    # q close to 1 leaves a slowly decaying tail
    assert hyper1_check(800.0, 0.3, 0.9) <= 1e-9


def test_series_errors_propagate():
    tight = DEFAULT_TOL.replace(series_max_terms=10)
    with pytest.raises(ConvergenceError):
        psi_prime_series(100.0, 7.0, 0.9, tight, accelerate=False)
