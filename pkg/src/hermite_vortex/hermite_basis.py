"""Gaussian core, scaled Hermite polynomials/functions and their velocity fields.

Conventions
-----------
``phi00(x; lam) = exp(-|x|^2 / lam^2) / (pi lam^2)`` is the Oseen (Lamb)
vortex profile and ``phi_k = D_x1^k1 D_x2^k2 phi00``.  The scaled Hermite
polynomials come from the generating function
``exp((2 t.z - |t|^2) / lam^2)``, so that ``H_k(z; lam) = lam^-|k| H_k1(z1/lam)
H_k2(z2/lam)`` in terms of the physicists' polynomials, and

    phi_k(x; lam) = (-1)^|k| H_k(x; lam) phi00(x; lam).

Points are arrays whose last axis has length 2; every function broadcasts over
the leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .jets import jet_entire_g, jet_variable

__all__ = [
    "HermiteIndex",
    "CoreParams",
    "hermite_indices",
    "lambda_of_t",
    "gaussian_phi00",
    "hermite_polynomial_1d",
    "hermite_polynomial",
    "hermite_function",
    "velocity_v00",
    "velocity_moment",
    "velocity_moments",
    "projection_prefactor",
    "basis_norm_sq",
]

TWO_PI = 2.0 * math.pi


class HermiteIndex(NamedTuple):
    k1: int
    k2: int

    @property
    def degree(self):
        return self.k1 + self.k2


def _index(k):
    k1, k2 = (int(v) for v in k)
    if k1 < 0 or k2 < 0:
        raise ValueError(f"Hermite index must be non-negative, got {(k1, k2)}")
    return HermiteIndex(k1, k2)


def hermite_indices(order):
    """All indices with ``k1 + k2 <= order``, graded, ``k1`` descending."""
    if order < 0:
        raise ValueError("order must be >= 0")
    return [HermiteIndex(d - j, j) for d in range(order + 1) for j in range(d + 1)]


@dataclass(frozen=True)
class CoreParams:
    """Initial core size ``lambda0`` and kinematic viscosity ``nu``."""

    lambda0: float
    nu: float = 0.0

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0}")
        if not self.nu >= 0:
            raise ValueError(f"nu must be non-negative, got {self.nu}")

    def lam(self, t):
        return lambda_of_t(self, t)


def lambda_of_t(p, t):
    """Core size ``sqrt(lambda0^2 + 4 nu t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    out = np.sqrt(p.lambda0 ** 2 + 4.0 * p.nu * t)
    return float(out) if out.ndim == 0 else out


def _check_lam(lam):
    if not lam > 0:
        raise ValueError(f"core size must be positive, got {lam}")


def _xy(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError("points must have a trailing axis of length 2")
    return x[..., 0], x[..., 1]


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def gaussian_phi00(x, lam):
    _check_lam(lam)
    x1, x2 = _xy(x)
    return _scalar(np.exp(-(x1 * x1 + x2 * x2) / lam ** 2) / (math.pi * lam ** 2))


def hermite_polynomial_1d(n, z, lam):
    """One-dimensional ``lam^-n H_n(z / lam)`` by the three-term recurrence."""
    z = np.asarray(z, dtype=float)
    inv = 1.0 / lam ** 2
    prev = np.ones_like(z)
    if n == 0:
        return prev
    cur = 2.0 * z * inv
    for j in range(1, n):
        prev, cur = cur, 2.0 * inv * (z * cur - j * prev)
    return cur


def hermite_polynomial(n, z, lam):
    _check_lam(lam)
    n = _index(n)
    z1, z2 = _xy(z)
    return _scalar(hermite_polynomial_1d(n.k1, z1, lam) * hermite_polynomial_1d(n.k2, z2, lam))


def hermite_function(k, x, lam):
    """``phi_k = D^k phi00`` evaluated through ``(-1)^|k| H_k phi00``."""
    k = _index(k)
    sign = -1.0 if k.degree % 2 else 1.0
    return _scalar(sign * hermite_polynomial(k, x, lam) * gaussian_phi00(x, lam))


def velocity_v00(x, lam):
    """Velocity of the unit Oseen vortex: ``x^perp / (2 pi |x|^2) (1 - e^{-|x|^2/lam^2})``."""
    _check_lam(lam)
    x1, x2 = _xy(x)
    u = (x1 * x1 + x2 * x2) / lam ** 2
    small = u < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(small, 1.0 - u / 2.0 + u * u / 6.0 - u ** 3 / 24.0,
                     -np.expm1(-u) / np.where(small, 1.0, u))
    g = g / (TWO_PI * lam ** 2)
    out = np.stack([-x2 * g, x1 * g], axis=-1)
    return out


def velocity_moments(order, x, lam):
    """All ``V_l`` with ``|l| <= order`` at the points ``x``, shape ``(..., P, 2)``.

    One 2-variable jet per point carries every derivative up to ``order``;
    ``g(u) = (1 - e^{-u / lam^2}) / u`` keeps the origin regular.
    """
    _check_lam(lam)
    idx = hermite_indices(order)
    pts = np.asarray(x, dtype=float)
    flat = pts.reshape(-1, 2)
    scale = np.array([math.factorial(a) * math.factorial(b) for a, b in idx]) / TWO_PI
    out = np.empty((len(flat), len(idx), 2))
    pos = None
    for i, (p1, p2) in enumerate(flat):
        y1 = jet_variable(0, p1, 2, order)
        y2 = jet_variable(1, p2, 2, order)
        g = jet_entire_g(y1 * y1 + y2 * y2, 1.0 / lam ** 2)
        if pos is None:
            pos = g._basis.indices(np.array(idx, dtype=np.int64))
        out[i, :, 0] = -(y2 * g).coeffs[pos] * scale
        out[i, :, 1] = (y1 * g).coeffs[pos] * scale
    return out.reshape(pts.shape[:-1] + (len(idx), 2))


def velocity_moment(l, x, lam):
    """``V_l = D^l V00`` at the points ``x``, via 2-variable jets."""
    l = _index(l)
    allv = velocity_moments(l.degree, x, lam)
    return allv[..., hermite_indices(l.degree).index(l), :]


def projection_prefactor(k, lam):
    """``(-1)^|k| lam^(2|k|) / (2^|k| k1! k2!)`` of the projection onto ``phi_k``."""
    k = _index(k)
    d = k.degree
    return (-1.0) ** d * lam ** (2 * d) / (2.0 ** d * math.factorial(k.k1) * math.factorial(k.k2))


def basis_norm_sq(k, lam):
    """Squared norm of ``phi_k`` in the Gaussian-inverse-weighted space."""
    k = _index(k)
    d = k.degree
    return 2.0 ** d * math.factorial(k.k1) * math.factorial(k.k2) / lam ** (2 * d)
