"""Inverse regularized incomplete beta function as a function of a.

q(a) solves I(q; a, b) = p. The package evaluates q, psi = -log q and
phi = -a log q, the exact series for psi'(a), and checks monotonicity,
limit, convexity and log-concavity statements on parameter grids.
"""

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import ConvergenceError, DomainError, TruncationError
from .gammafns import GammaQuantileQuery, digamma, gamma_quantile, ln_gamma, reg_lower_gamma
from .incbeta import BetaParams, reg_inc_beta
from .quantile import QuantileResult, phi, psi, quantile, quantile_wrt_b
from .report import CheckRecord, VerificationReport
from .series import (
    Y,
    Y_t_route,
    eta_integral_identity,
    find_rho,
    h0_eval,
    hyper1_check,
    psi_prime_series,
    q_prime_series,
    sum1_check,
    sum2_check,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "ToleranceConfig",
    "ConvergenceError",
    "DomainError",
    "TruncationError",
    "GammaQuantileQuery",
    "digamma",
    "gamma_quantile",
    "ln_gamma",
    "reg_lower_gamma",
    "BetaParams",
    "reg_inc_beta",
    "QuantileResult",
    "phi",
    "psi",
    "quantile",
    "quantile_wrt_b",
    "CheckRecord",
    "VerificationReport",
    "Y",
    "Y_t_route",
    "eta_integral_identity",
    "find_rho",
    "h0_eval",
    "hyper1_check",
    "psi_prime_series",
    "q_prime_series",
    "sum1_check",
    "sum2_check",
]
