"""Interaction kernels whose derivatives at the origin give the ODE coefficients.

Variables are ordered ``(a1, a2, b1, b2, t1, t2)``: ``a`` shifts the vorticity
factor, ``b`` shifts the velocity factor and ``t`` generates the Hermite
polynomial of the projection.  Every kernel is built inside jet arithmetic from
the regularized velocity field of the convolved Gaussian pair,

    W(y; lam) = y^perp / (2 pi |y|^2) * (1 - exp(-|y|^2 / (2 lam^2))),

with ``y = b + t - a - s``.  Carrying the Hermite generating factor through the
Gaussian overlap integral gives ``F(a, b, t) = exp(-2 a.t / lam^2) W(y)``;
``W`` is divergence free, so

    K(a, b, t; s) = div_a F = -(2 / lam^2) exp(-2 a.t / lam^2) t.W(y).

Jets are truncated per variable group, so ``order`` bounds the degree in each
of ``a``, ``b`` and ``t`` separately.
"""

from __future__ import annotations

import math

import numpy as np

from .jets import jet_entire_g, jet_exp, jet_variable

__all__ = [
    "separation",
    "kernel_K_jet",
    "kernel_K_multi_jet",
    "xi_integrand_jet",
    "regularized_velocity",
    "kernel_K_pointwise",
]

KERNEL_GROUPS = (2, 2, 2)
XI_GROUPS = (2, 2)


def separation(x_j, x_jp):
    """Separation ``s_{j,j'} = x^{j'} - x^j`` used by every kernel here.

    The velocity of vortex ``j'`` seen at offset ``z`` from vortex ``j`` is
    ``u^{j'}(z - s_{j,j'})``.
    """
    return np.asarray(x_jp, dtype=float) - np.asarray(x_j, dtype=float)


def _check(order, lam):
    if order < 0:
        raise ValueError("order must be >= 0")
    if not lam > 0:
        raise ValueError("lambda must be positive")


def _w_components(y1, y2, lam):
    g = jet_entire_g(y1 * y1 + y2 * y2, 1.0 / (2.0 * lam ** 2))
    return -(y2 * g) / (2.0 * math.pi), (y1 * g) / (2.0 * math.pi)


def kernel_K_multi_jet(order, s, lam):
    """6-variable jet of ``K(a, b - s, t)`` about ``a = b = t = 0``."""
    _check(order, lam)
    s1, s2 = (float(v) for v in s)

    def var(i, base=0.0):
        return jet_variable(i, base, 6, order, groups=KERNEL_GROUPS)

    a1, a2, b1, b2, t1, t2 = (var(i) for i in range(6))
    y1 = b1 + t1 - a1 - s1
    y2 = b2 + t2 - a2 - s2
    w1, w2 = _w_components(y1, y2, lam)
    t_dot_w = t1 * w1 + t2 * w2
    gen = jet_exp((a1 * t1 + a2 * t2) * (-2.0 / lam ** 2))
    return (gen * t_dot_w) * (-2.0 / lam ** 2)


def kernel_K_jet(order, lam):
    """Single-centre kernel jet (``s = 0``)."""
    return kernel_K_multi_jet(order, (0.0, 0.0), lam)


def xi_integrand_jet(order, s, lam):
    """Both components of ``W(b - a - s)`` as 4-variable jets in ``(a1, a2, b1, b2)``."""
    _check(order, lam)
    s1, s2 = (float(v) for v in s)
    a1, a2, b1, b2 = (jet_variable(i, 0.0, 4, order, groups=XI_GROUPS) for i in range(4))
    return _w_components(b1 - a1 - s1, b2 - a2 - s2, lam)


def regularized_velocity(y, lam):
    """Pointwise ``W(y; lam)``, the velocity of a Gaussian of core ``sqrt(2) lam``."""
    y = np.asarray(y, dtype=float)
    r2 = y[..., 0] ** 2 + y[..., 1] ** 2
    u = r2 / (2.0 * lam ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(u < 1e-8, 1.0 - u / 2.0, -np.expm1(-u) / np.where(u < 1e-8, 1.0, u))
    g = g / (2.0 * lam ** 2 * 2.0 * math.pi)
    return np.stack([-y[..., 1] * g, y[..., 0] * g], axis=-1)


def kernel_K_pointwise(a, b, t, s, lam):
    """Direct evaluation of ``K(a, b - s, t)`` (used as a finite-difference check)."""
    a, b, t, s = (np.asarray(v, dtype=float) for v in (a, b, t, s))
    w = regularized_velocity(b + t - a - s, lam)
    at = a[..., 0] * t[..., 0] + a[..., 1] * t[..., 1]
    tw = t[..., 0] * w[..., 0] + t[..., 1] * w[..., 1]
    return -(2.0 / lam ** 2) * np.exp(-2.0 * at / lam ** 2) * tw
