"""Independent baselines: point vortices, the leading-order Gaussian pair and
the two closed-form rotation frequencies of a co-rotating pair.

All models share the counterclockwise Biot-Savart convention
``u(x) = (1/2 pi) sum_l m_l (x - x^l)^perp / |x - x^l|^2`` with
``y^perp = (-y2, y1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrate import rk4_step, step_count
from .spectral import SpectralResult, spectral_oracle

__all__ = [
    "PointVortexSystem",
    "point_vortex_rhs",
    "gaussian_pair_rhs",
    "rotation_frequency_new",
    "rotation_frequency_quadrupole",
    "integrate_point_vortices",
    "integrate_gaussian_pair",
    "angular_rate",
    "spectral_oracle",
    "SpectralResult",
]

SERIES_THRESHOLD = 1e-8


@dataclass
class PointVortexSystem:
    positions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        self.masses = np.asarray(self.masses, dtype=float).reshape(-1)
        if len(self.masses) != len(self.positions):
            raise ValueError("need one mass per position")
        _check_distinct(self.positions)


def _check_distinct(pos):
    d = pos[:, None, :] - pos[None, :, :]
    r2 = (d ** 2).sum(-1)
    np.fill_diagonal(r2, np.inf)
    if np.any(r2 <= 0.0):
        raise ValueError("point vortices must be at distinct positions")
    return d, r2


def point_vortex_rhs(sys):
    """Velocities of all point vortices, self-interaction omitted."""
    pos = sys.positions if isinstance(sys, PointVortexSystem) else np.asarray(sys[0], float)
    masses = sys.masses if isinstance(sys, PointVortexSystem) else np.asarray(sys[1], float)
    d, r2 = _check_distinct(pos)
    w = masses[None, :] / (2.0 * math.pi * r2)
    return np.stack([-(d[..., 1] * w).sum(1), (d[..., 0] * w).sum(1)], axis=-1)


def gaussian_pair_rhs(x1, x2, M1, M2, lambda1, lambda2):
    """Centre velocities of two Gaussian vortices at leading order.

    The mutual core is ``lambda1^2 + lambda2^2``, which reduces to
    ``2 lam^2`` for a shared core.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    d = x1 - x2
    r2 = float(d @ d)
    if r2 == 0.0:
        raise ValueError("Gaussian centres must differ")
    f = -math.expm1(-r2 / (lambda1 ** 2 + lambda2 ** 2)) / (2.0 * math.pi * r2)
    perp = np.array([-d[1], d[0]])
    return M2 * f * perp, -M1 * f * perp


def rotation_frequency_new(M, r, lam):
    """Angular rate ``M / (4 pi r^2) (1 - exp(-2 r^2 / lam^2))`` of an equal pair at radius ``r``."""
    r = np.asarray(r, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if not (np.all(r > 0) and np.all(lam > 0)):
        raise ValueError("r and lambda must be positive")
    out = -M * np.expm1(-2.0 * r ** 2 / lam ** 2) / (4.0 * math.pi * r ** 2)
    return float(out) if out.ndim == 0 else out


def rotation_frequency_quadrupole(M, r, lambda0, nu, t):
    """Angular rate of the far-field quadrupole model with growing cores."""
    if not r > 0:
        raise ValueError("r must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    x = nu * t / r ** 2
    small = x < SERIES_THRESHOLD
    xs = np.where(small, 1.0, x)
    exact = np.log1p(4.0 * xs) / (2.0 * xs * r ** 2)
    series = 2.0 / r ** 2 - 4.0 * x / r ** 2
    core = (lambda0 ** 2 / r ** 4) / (1.0 + 4.0 * x)
    out = M / (8.0 * math.pi) * (np.where(small, series, exact) - core)
    return float(out) if out.ndim == 0 else out


def angular_rate(x1, x2, v1, v2):
    """Rate of turn of the separation vector ``x2 - x1``."""
    d = np.asarray(x2, float) - np.asarray(x1, float)
    dv = np.asarray(v2, float) - np.asarray(v1, float)
    return float((d[0] * dv[1] - d[1] * dv[0]) / (d @ d))


def integrate_point_vortices(sys, T, dt):
    """RK4 trajectories; returns ``(times, positions)`` with positions ``(steps+1, n, 2)``."""
    n = step_count(T, dt)
    h = T / n if n else 0.0
    masses = sys.masses

    def f(t, y):
        return point_vortex_rhs((y.reshape(-1, 2), masses)).ravel()

    y = sys.positions.ravel().copy()
    out = [y.copy()]
    for i in range(n):
        y = rk4_step(f, i * h, y, h)
        out.append(y.copy())
    return h * np.arange(n + 1), np.array(out).reshape(n + 1, -1, 2)


def integrate_gaussian_pair(x1, x2, M1, M2, lambda0, nu, T, dt, lambda0_2=None):
    """RK4 trajectories of the leading-order pair with ``lam_j(t)^2 = lam_j0^2 + 4 nu t``."""
    l1 = float(lambda0)
    l2 = l1 if lambda0_2 is None else float(lambda0_2)
    n = step_count(T, dt)
    h = T / n if n else 0.0

    def f(t, y):
        a, b = gaussian_pair_rhs(y[:2], y[2:], M1, M2, math.sqrt(l1 ** 2 + 4 * nu * t),
                                 math.sqrt(l2 ** 2 + 4 * nu * t))
        return np.concatenate([a, b])

    y = np.concatenate([np.asarray(x1, float), np.asarray(x2, float)])
    out = [y.copy()]
    for i in range(n):
        y = rk4_step(f, i * h, y, h)
        out.append(y.copy())
    return h * np.arange(n + 1), np.array(out).reshape(n + 1, 2, 2)
