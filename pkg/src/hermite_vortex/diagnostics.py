"""Conservation and convergence monitors for moment-engine runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import GridField, _times_inverse_weight, eval_velocity, eval_vorticity, gauss_hermite_2d
from .hermite_basis import basis_norm_sq

__all__ = [
    "EnstrophyResult",
    "DiagnosticsRow",
    "weighted_enstrophy",
    "moment_enstrophy",
    "tail_fraction",
    "monitor",
    "Monitor",
    "growth_bound",
    "velocity_bound",
]


@dataclass(frozen=True)
class EnstrophyResult:
    value: float
    converged: bool
    delta: float = 0.0

    def __float__(self):
        return self.value


def _gh_enstrophy(omega, lam, center, nodes):
    pts, w, r2 = gauss_hermite_2d(lam, nodes, center)
    vals = np.asarray(omega(pts), dtype=float)
    # pi lam^2 exp(+r2) omega^2 against the rule's exp(-r2) weight
    f = _times_inverse_weight(_times_inverse_weight(vals * vals, r2), r2)
    return math.pi * lam ** 2 * float(np.sum(w * f))


def weighted_enstrophy(omega, lam, center=(0.0, 0.0), nodes=64, tol=1e-8):
    """``pi lam^2 int exp(|x - c|^2 / lam^2) omega(x)^2 dx`` with a convergence flag.

    Callables use Gauss-Hermite quadrature checked by node doubling; grid
    fields use the rectangle rule and are flagged when the weighted integrand
    is not negligible at the boundary.  A non-converged result still carries
    the partial value.
    """
    if isinstance(omega, GridField):
        z = omega.points() - np.asarray(center, dtype=float)
        r2 = (z ** 2).sum(-1) / lam ** 2
        with np.errstate(over="ignore"):
            f = np.exp(np.minimum(r2, 700.0) + 2.0 * np.log(np.abs(omega.values) + 1e-300))
        value = math.pi * lam ** 2 * float(f.sum() * omega.spacing ** 2)
        edge = np.concatenate([f[0], f[-1], f[:, 0], f[:, -1]]).max()
        ok = bool(np.isfinite(value) and edge <= tol * max(f.max(), 1e-300))
        return EnstrophyResult(value, ok, float(edge))
    a = _gh_enstrophy(omega, lam, center, nodes)
    b = _gh_enstrophy(omega, lam, center, 2 * nodes)
    delta = abs(a - b)
    ok = bool(np.isfinite(b) and delta <= tol * max(1.0, abs(b)))
    return EnstrophyResult(b, ok, delta)


def moment_enstrophy(indices, coeffs, lam):
    """Weighted enstrophy of a moment expansion from basis orthogonality."""
    return float(sum(m * m * basis_norm_sq(k, lam) for k, m in zip(indices, coeffs)))


def tail_fraction(indices, coeffs, lam):
    """Share of ``sum |M[k]| ||phi_k||`` carried by the top shell ``|k| = N``."""
    w = np.array([abs(m) * math.sqrt(basis_norm_sq(k, lam)) for k, m in zip(indices, coeffs)])
    deg = np.array([k[0] + k[1] for k in indices])
    total = w.sum()
    if total == 0.0 or deg.max() == 0:
        return 0.0
    return float(w[deg == deg.max()].sum() / total)


@dataclass
class DiagnosticsRow:
    t: float
    mass_drift: np.ndarray
    first_moment: np.ndarray
    enstrophy: np.ndarray
    tail: np.ndarray
    impulse_drift: float
    converged: np.ndarray
    flags: list = field(default_factory=list)

    def is_finite(self):
        return bool(all(np.all(np.isfinite(v)) for v in
                        (self.mass_drift, self.first_moment, self.enstrophy, self.tail))
                    and np.isfinite(self.impulse_drift))

    def as_dict(self):
        out = {"t": self.t, "impulse_drift": self.impulse_drift}
        for j in range(len(self.enstrophy)):
            out[f"mass_drift_{j}"] = float(self.mass_drift[j])
            out[f"first_moment_{j}"] = float(self.first_moment[j])
            out[f"enstrophy_{j}"] = float(self.enstrophy[j])
            out[f"tail_{j}"] = float(self.tail[j])
        return out


class _Single:
    """One vortex of a state, recentred, as a stand-in state for field evaluation."""

    def __init__(self, v, lam):
        self.vortices = [type(v)((0.0, 0.0), v.moments, v.mass, v.lambda0)]
        self.lam = lam


def velocity_bound(state, nodes=32):
    """Estimate of ``max |u|`` over the plane from samples around each vortex."""
    best = 0.0
    for j, v in enumerate(state.vortices):
        lam = state.lam_of(j)
        g = np.linspace(-4.0 * lam, 4.0 * lam, nodes)
        X1, X2 = np.meshgrid(g, g, indexing="ij")
        pts = np.stack([X1, X2], axis=-1) + v.center
        u = eval_velocity(state, pts)
        best = max(best, float(np.sqrt((u ** 2).sum(-1)).max()))
    return best


def growth_bound(C, nu, lam, dt):
    """Admissible increase of ``log E`` over ``dt``: ``(4 C / nu + 4 nu / lam^2) dt``."""
    if nu == 0.0:
        return math.inf
    return (4.0 * C / nu + 4.0 * nu / lam ** 2) * dt


class Monitor:
    """Stateful diagnostics: remembers the initial state for drifts and growth checks."""

    def __init__(self, initial, quadrature=True):
        self.masses = np.array([v.mass for v in initial.vortices])
        self.impulse0 = self._impulse(initial)
        self.C = velocity_bound(initial)
        self.nu = initial.core.nu
        self.quadrature = quadrature
        self.rows = []

    @staticmethod
    def _impulse(state):
        return sum(v.mass * v.center for v in state.vortices)

    def __call__(self, state):
        n = len(state.vortices)
        mass_drift = np.zeros(n)
        first = np.zeros(n)
        ens = np.zeros(n)
        tail = np.zeros(n)
        conv = np.ones(n, dtype=bool)
        flags = []
        for j, v in enumerate(state.vortices):
            lam = state.lam_of(j)
            mass_drift[j] = v.moments[0, 0] - self.masses[j]
            first[j] = math.hypot(v.moments[1, 0], v.moments[0, 1])
            if self.quadrature:
                single = _Single(v, lam)
                res = weighted_enstrophy(lambda x: eval_vorticity(single, x), lam)
                ens[j], conv[j] = res.value, res.converged
            else:
                ens[j] = moment_enstrophy(v.moments.indices, v.moments.coeffs, lam)
            tail[j] = tail_fraction(v.moments.indices, v.moments.coeffs, lam)
            if not conv[j] or not np.isfinite(ens[j]):
                flags.append(f"enstrophy of vortex {j} diverges")
        if self.rows:
            prev = self.rows[-1]
            dt = state.t - prev.t
            growth = np.log(ens) - np.log(prev.enstrophy)
            for j in range(n):
                bound = growth_bound(self.C, self.nu, state.lam_of(j), dt)
                if growth[j] > bound:
                    flags.append(f"log E of vortex {j} grew {growth[j]:.3e} > bound {bound:.3e}")
        imp = float(np.abs(self._impulse(state) - self.impulse0).max())
        row = DiagnosticsRow(float(state.t), mass_drift, first, ens, tail, imp, conv, flags)
        self.rows.append(row)
        return row


def monitor(state, reference=None):
    """Diagnostics for one state; drifts are measured against ``reference`` (default: itself)."""
    return Monitor(reference if reference is not None else state)(state)
