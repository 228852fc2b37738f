import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from invbeta.errors import DomainError
from invbeta.incbeta import (
    BetaParams,
    ibeta_psi,
    log_beta,
    reflect,
    reg_inc_beta,
    reg_inc_beta_complement,
)

# mpmath betainc at 40 digits
ORACLE = [
    (0.3, 2.0, 3.0, 0.34830),
    (0.5, 0.5, 0.5, 0.5),
    (0.01, 0.3, 5.0, 0.43999627247306492751),
    (0.9, 20.0, 2.0, 0.36472996377170799001),
    (0.999, 1000.0, 0.5, 0.157247274266723828),
    (1e-5, 0.1, 7.0, 0.40116466808968180376),
    (0.6, 300.0, 200.0, 0.49757138368006800431),
]

shapes = st.floats(0.05, 500.0)
unit = st.floats(0.0, 1.0)


@pytest.mark.parametrize("x,a,b,expected", ORACLE)
def test_against_mpmath(x, a, b, expected):
    assert reg_inc_beta(x, a, b) == pytest.approx(expected, rel=1e-13)


def test_polynomial_case():
    # I(x; 2, 3) = 6x^2 - 8x^3 + 3x^4
    for x in (0.05, 0.3, 0.5, 0.77):
        assert reg_inc_beta(x, 2.0, 3.0) == pytest.approx(6 * x**2 - 8 * x**3 + 3 * x**4, rel=1e-14)


def test_closed_forms():
    for x in (1e-8, 0.2, 0.9):
        assert reg_inc_beta(x, 1.0, 1.0) == pytest.approx(x, rel=1e-15)
        assert reg_inc_beta(x, 3.5, 1.0) == pytest.approx(x**3.5, rel=1e-14)
        assert reg_inc_beta(x, 1.0, 2.5) == pytest.approx(-math.expm1(2.5 * math.log1p(-x)), rel=1e-14)


def test_endpoints():
    assert reg_inc_beta(0.0, 2.0, 3.0) == 0.0
    assert reg_inc_beta(1.0, 2.0, 3.0) == 1.0


# dyadic x keeps 1 - x exact, so both sides see the same point
dyadic = st.integers(0, 2**20).map(lambda k: k / 2**20)


@given(x=dyadic, a=shapes, b=shapes)
def test_reflection(x, a, b):
    assert abs(reg_inc_beta(x, a, b) - reflect(x, a, b)) <= 1e-13


@pytest.mark.parametrize("x", [1e-18, 1e-68, 1e-300])
def test_tiny_x_with_large_shapes(x):
    value = reg_inc_beta(x, 15.0, 15.0)
    expected = math.exp(15 * math.log(x) - special.betaln(15, 15) - math.log(15))
    assert value == pytest.approx(expected, rel=1e-12, abs=1e-300)


@given(x=unit, a=st.floats(0.05, 50.0), b=st.floats(0.05, 50.0))
def test_matches_scipy(x, a, b):
    assert reg_inc_beta(x, a, b) == pytest.approx(special.betainc(a, b, x), rel=1e-11, abs=1e-14)


@given(a=shapes, b=shapes, x=st.floats(0.001, 0.999), dx=st.floats(1e-6, 0.1))
def test_monotone_in_x(a, b, x, dx):
    assert reg_inc_beta(min(x + dx, 1.0), a, b) >= reg_inc_beta(x, a, b) - 1e-15


def test_complement():
    assert reg_inc_beta_complement(0.999, 1000.0, 0.5) == pytest.approx(1 - 0.157247274266723828, rel=1e-13)
    assert reg_inc_beta_complement(1e-3, 2.0, 2.0) == pytest.approx(1 - special.betainc(2, 2, 1e-3), rel=1e-15)


def test_psi_form_near_one():
    # q = exp(-psi) with psi tiny: 1 - q is only known through psi
    psi = 1e-12
    exact = special.betainc(2.0, 3.0, -math.expm1(-psi))
    assert 1.0 - ibeta_psi(2.0, 3.0, psi) == pytest.approx(1.0 - (1.0 - exact), abs=1e-20)
    assert ibeta_psi(0.5, 2.0, 800.0) > 0.0  # exp(-800) underflows, the log form does not


def test_log_beta():
    assert log_beta(2.0, 3.0) == pytest.approx(math.log(1 / 12), rel=1e-15)
    for a, b in [(0.3, 0.7), (50.0, 0.5), (300.0, 200.0)]:
        assert log_beta(a, b) == pytest.approx(special.betaln(a, b), rel=1e-14)


@pytest.mark.parametrize("args", [(1.2, 1.0, 1.0), (-0.1, 1.0, 1.0), (0.5, 0.0, 1.0), (0.5, 1.0, -2.0)])
def test_domain(args):
    with pytest.raises(DomainError):
        reg_inc_beta(*args)


@pytest.mark.parametrize("args", [(0.0, 1.0, 0.5), (1.0, math.inf, 0.5), (1.0, 1.0, 1.0), (1.0, 1.0, 0.0)])
def test_params_validation(args):
    with pytest.raises(DomainError):
        BetaParams(*args)
