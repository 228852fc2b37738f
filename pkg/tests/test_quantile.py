import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invbeta.config import DEFAULT_TOL, ToleranceConfig
from invbeta.errors import ConvergenceError, DomainError
from invbeta.incbeta import BetaParams, ibeta_psi, reg_inc_beta
from invbeta.quantile import exp_form_density, phi, psi, quantile, quantile_wrt_b

# psi = -log q by 200-step bisection of mpmath betainc at 40 digits
PSI_ORACLE = [
    (2.0, 3.0, 0.5, 0.95262394073914414848),
    (0.5, 0.5, 0.3, 1.5793580136871038352),
    (10.0, 2.5, 0.9, 0.075073125641129131044),
    (0.05, 3.0, 0.1, 47.521357395076980094),
    (500.0, 0.3, 0.5, 0.00014636470356256158197),
    (1.7, 7.0, 0.75, 1.3073421016138351534),
    (0.01, 0.5, 0.5, 67.944636351111559334),
]

shape = st.floats(0.01, 1000.0)
level = st.floats(1e-6, 1.0 - 1e-6)


@pytest.mark.parametrize("a,b,p,expected", PSI_ORACLE)
def test_psi_oracle(a, b, p, expected):
    assert psi(a, b, p) == pytest.approx(expected, rel=1e-12)


def test_symmetric_median():
    res = quantile(BetaParams(2.0, 2.0, 0.5))
    assert res.q == 0.5


def test_closed_form_b1():
    for a in (0.01, 0.3, 3.0, 250.0):
        for p in (0.1, 0.25, 0.9):
            assert quantile(BetaParams(a, 1.0, p)).q == pytest.approx(p ** (1 / a), abs=1e-12)


def test_quartic_case():
    # I(q; 2, 3) = 1/2 has a quartic on the left; check it directly
    q = quantile(BetaParams(2.0, 3.0, 0.5)).q
    assert 6 * q**2 - 8 * q**3 + 3 * q**4 == pytest.approx(0.5, abs=1e-15)


def test_underflowed_q_keeps_psi():
    res = quantile(BetaParams(1e-4, 2.0, 0.5))
    assert res.q == 0.0
    assert math.isfinite(res.psi) and res.psi > 700
    assert abs(ibeta_psi(1e-4, 2.0, res.psi) - 0.5) <= 1e-13


@given(a=shape, b=shape, p=level)
def test_defining_equation(a, b, p):
    res = quantile(BetaParams(a, b, p))
    assert res.residual <= DEFAULT_TOL.quantile_abs_tol
    assert abs(ibeta_psi(a, b, res.psi) - p) <= DEFAULT_TOL.quantile_abs_tol


@given(a=st.floats(0.05, 200.0), b=st.floats(0.05, 200.0), p=st.floats(1e-4, 1 - 1e-4))
def test_reflection_route(a, b, p):
    direct = quantile(BetaParams(a, b, p)).q
    mirrored = quantile_wrt_b(a, b, p).q
    assert abs(direct - mirrored) <= 2e-13 + 1e-12 * direct


@given(a=st.floats(0.01, 500.0), factor=st.floats(1.001, 4.0), b=shape, p=level)
def test_increasing_in_a(a, factor, b, p):
    assert psi(a * factor, b, p) < psi(a, b, p)


@given(a=shape, b=shape, p=st.floats(0.01, 0.98), dp=st.floats(1e-3, 0.01))
def test_increasing_in_p(a, b, p, dp):
    assert psi(a, b, p + dp) < psi(a, b, p)


def test_phi_is_a_psi():
    assert phi(3.0, 2.0, 0.4) == pytest.approx(3.0 * psi(3.0, 2.0, 0.4), rel=1e-15)


def test_exp_form_density_normalises():
    from scipy import integrate

    for a, b in [(0.5, 2.0), (3.0, 0.5), (1.0, 1.0)]:
        total, _ = integrate.quad(lambda s: exp_form_density(a, b, s), 0, np.inf)
        assert total == pytest.approx(a * math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)), rel=1e-8)


def test_exp_form_tail_is_phi():
    # the mass of the exp-form density beyond phi is p
    from scipy import integrate

    a, b, p = 2.0, 3.0, 0.3
    f = lambda s: exp_form_density(a, b, s)
    total, _ = integrate.quad(f, 0, np.inf)
    tail, _ = integrate.quad(f, phi(a, b, p), np.inf)
    assert tail / total == pytest.approx(p, rel=1e-9)


def test_tolerance_too_tight_raises():
    tight = ToleranceConfig(quantile_abs_tol=1e-20)
    with pytest.raises(ConvergenceError):
        quantile(BetaParams(0.7, 3.3, 0.123), tight)


def test_config_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(quantile_abs_tol=0.0)
    with pytest.raises(ValueError):
        ToleranceConfig(max_newton_iters=2)
    assert DEFAULT_TOL.replace(fd_rel_step=1e-3).fd_rel_step == 1e-3


@pytest.mark.parametrize("a,b,p", [(0, 1, 0.5), (1, -1, 0.5), (1, 1, 0), (1, 1, 1), (math.nan, 1, 0.5)])
def test_domain(a, b, p):
    with pytest.raises(DomainError):
        quantile(BetaParams(a, b, p))


def test_bracket_contains_answer():
    res = quantile(BetaParams(0.8, 1.7, 0.6))
    assert res.bracket_width >= 0
    assert res.iterations <= DEFAULT_TOL.max_newton_iters
    assert abs(reg_inc_beta(res.q, 0.8, 1.7) - 0.6) <= 1e-13
