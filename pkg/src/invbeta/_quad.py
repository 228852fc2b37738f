"""Composite Gauss rules for integrals over [0, psi] of the form

    int_0^psi K(v) g(v) dv,   g(v) = ((1 - e^{v - psi}) / (1 - e^{-psi}))^(b - 1),

where the kernel K decays on a length scale 1/scale and g has an algebraic
endpoint singularity (or zero) at v = psi. The interval is split into
Gauss-Legendre panels that grow geometrically away from v = 0 (in units of
1/scale) and shrink geometrically towards the singular end, which is closed
by one Gauss-Jacobi panel carrying the weight (psi - v)^(b - 1).

Everything is vectorised over an array of scales so a whole block of series
terms shares one pass.
"""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

LEGENDRE_NODES = 12
JACOBI_NODES = 20
# panel ends in units of 1/scale; e^{-64} is below double precision
_LEFT = np.array([0.5, 1.0, 2.0, 4.0, 8.0, 12.0, 16.0, 24.0, 32.0, 40.0, 48.0, 56.0])
_CUTOFF = 64.0
_RIGHT = np.array([2.0**k - 1.0 for k in range(1, 14)])


@lru_cache(maxsize=None)
def _legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=256)
def _jacobi(n, alpha):
    x, w = roots_jacobi(n, alpha, 0.0)
    return x, w


def measure(
    psi, b, scales, legendre_nodes=LEGENDRE_NODES, jacobi_nodes=JACOBI_NODES, inner=None
):
    """Nodes and weights for int_0^psi K(v) g(v) dv at each scale.

    Returns ``(V, W)`` with shape ``(len(scales), m)`` such that the integral
    is ``sum(W * K(V), axis=1)``; ``W`` already includes g and the Jacobians.
    A scale of zero means the kernel does not decay. ``inner`` adds panels
    halving down to ``0.5 / inner`` for kernels that also vary on a shorter
    length near v = 0.
    """
    scales = np.atleast_1d(np.asarray(scales, dtype=float))
    n = scales.size
    em1 = -np.expm1(-psi)
    # subnormal scales overflow 1/scale to inf, which the clipping absorbs
    safe = np.where(scales > 0, scales, 1.0)
    span = np.where(scales > 0, scales * psi, 0.0)
    with np.errstate(over="ignore"):
        # g varies on an O(1) length near v = psi whatever the kernel does
        jac_len = np.minimum(np.where(span > 4.0, 2.0 / safe, 0.5 * psi), 2.0)
        end = psi - jac_len
        upper = np.where(scales > 0, np.minimum(end, _CUTOFF / safe), end)
        left = np.where(scales[:, None] > 0, _LEFT[None, :] / safe[:, None], upper[:, None])
    if inner is not None and inner > np.max(scales) > 0:
        depth = int(np.ceil(np.log2(inner / np.min(safe))))
        extra = (0.5 / safe[:, None]) * 2.0 ** -np.arange(1, depth + 1)[None, :]
        left = np.concatenate([left, np.minimum(extra, upper[:, None])], axis=1)
    right = end[:, None] - jac_len[:, None] * _RIGHT[None, :]
    cuts = np.concatenate(
        [np.zeros((n, 1)), left, right, upper[:, None]], axis=1
    )
    cuts = np.sort(np.clip(cuts, 0.0, upper[:, None]), axis=1)
    lo, hi = cuts[:, :-1], cuts[:, 1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    xg, wg = _legendre(legendre_nodes)
    v_leg = (mid[:, :, None] + half[:, :, None] * xg).reshape(n, -1)
    w_leg = (half[:, :, None] * wg).reshape(n, -1)
    with np.errstate(divide="ignore"):
        log_g = (b - 1.0) * (np.log(-np.expm1(v_leg - psi)) - np.log(em1))
    w_leg = np.where(w_leg > 0, w_leg * np.exp(log_g), 0.0)

    xj, wj = _jacobi(jacobi_nodes, b - 1.0)
    dist = 0.5 * jac_len[:, None] * (1.0 - xj[None, :])
    v_jac = psi - dist
    # g(v) = (psi - v)^(b-1) * R(v) with R analytic
    log_r = (b - 1.0) * (np.log(-np.expm1(-dist) / dist) - np.log(em1))
    w_jac = (0.5 * jac_len[:, None]) ** b * wj[None, :] * np.exp(log_r)

    return np.concatenate([v_leg, v_jac], axis=1), np.concatenate([w_leg, w_jac], axis=1)


def integrate_exp_kernel(psi, b, rates, **nodes):
    """int_0^psi e^{-c v} g(v) dv for every rate c (c >= 0)."""
    rates = np.atleast_1d(np.asarray(rates, dtype=float))
    v, w = measure(psi, b, rates, **nodes)
    return np.sum(w * np.exp(-rates[:, None] * v), axis=1)
