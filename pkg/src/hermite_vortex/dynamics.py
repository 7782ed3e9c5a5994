"""Coupled Hermite-moment and vortex-centre ODEs for interacting vortices.

Each vortex ``j`` carries a centre ``x^j``, a truncated moment array
``M^j[k]`` (``|k| <= N``) and its total vorticity ``m_j = M^j[0,0]``.  With
``s = x^{j'} - x^j`` and a shared core size ``lam(t)``:

    dM^j[k]/dt = -c_k(lam) sum_{j'} sum_{l,m} Gamma[k,l,m](s, lam) M^j[l] M^{j'}[m]
                 + xdot^j_1 M^j[k - e1] + xdot^j_2 M^j[k - e2]

    dx^j/dt    = (1/m_j) sum_{j'} sum_{l,m} Xi[l,m](s, lam) M^j[l] M^{j'}[m]

``c_k`` is the projection prefactor.  The index-shift terms come from writing
each vortex in its moving frame; without them the first moments drift.
Moments above order ``N`` are treated as zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .fields import GridField, project_moments
from .hermite_basis import (
    CoreParams,
    HermiteIndex,
    hermite_indices,
    lambda_of_t,
    projection_prefactor,
)
from .integrate import NumericalAbort, rk4_step, step_count
from .kernels import separation
from .tensors import TensorCache

__all__ = [
    "MomentSet",
    "VortexState",
    "SystemState",
    "DynamicsOptions",
    "Trajectory",
    "MomentSystem",
    "decompose_initial",
    "moment_rhs",
    "center_rhs",
    "integrate",
]

log = logging.getLogger(__name__)

MASS_DRIFT_LIMIT = 1e-8
ZERO_MASS_RTOL = 1e-12


class MomentSet:
    """Moments ``M[k1, k2]`` for ``k1 + k2 <= order`` (flat, graded layout)."""

    def __init__(self, order, coeffs=None):
        self.order = int(order)
        self.indices = hermite_indices(self.order)
        if coeffs is None:
            coeffs = np.zeros(len(self.indices))
        coeffs = np.array(coeffs, dtype=float)
        if coeffs.shape != (len(self.indices),):
            raise ValueError(f"order {order} needs {len(self.indices)} moments")
        self.coeffs = coeffs

    @classmethod
    def gaussian(cls, order, mass, extra=None):
        ms = cls(order)
        ms.coeffs[0] = mass
        for k, v in (extra or {}).items():
            ms[k] = v
        return ms

    def _pos(self, k):
        k = HermiteIndex(*k)
        if k.degree > self.order or min(k) < 0:
            return None
        return k.degree * (k.degree + 1) // 2 + k.k2

    def __getitem__(self, k):
        pos = self._pos(k)
        return 0.0 if pos is None else float(self.coeffs[pos])

    def __setitem__(self, k, value):
        pos = self._pos(k)
        if pos is None:
            raise KeyError(f"index {tuple(k)} beyond order {self.order}")
        self.coeffs[pos] = value

    def as_triangle(self):
        out = np.zeros((self.order + 1, self.order + 1))
        for k, v in zip(self.indices, self.coeffs):
            out[k] = v
        return out

    def copy(self):
        return MomentSet(self.order, self.coeffs.copy())

    def __repr__(self):
        nz = {tuple(k): float(v) for k, v in zip(self.indices, self.coeffs) if v != 0.0}
        return f"MomentSet(order={self.order}, {nz})"


@dataclass
class VortexState:
    center: np.ndarray
    moments: MomentSet
    mass: float = None
    lambda0: float = None  # per-vortex core, leading order only

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        if self.mass is None:
            self.mass = self.moments[0, 0]
        if self.mass == 0.0:
            raise ValueError("vortex mass must be non-zero")
        if self.moments[0, 0] != self.mass:
            raise ValueError("M[0,0] must equal the vortex mass")


@dataclass
class SystemState:
    t: float
    vortices: list
    core: CoreParams

    @property
    def order(self):
        return self.vortices[0].moments.order

    @property
    def lam(self):
        return lambda_of_t(self.core, self.t)

    def lam_of(self, j):
        lam0 = self.vortices[j].lambda0
        if lam0 is None:
            return self.lam
        return lambda_of_t(CoreParams(lam0, self.core.nu), self.t)

    def copy(self):
        vs = [replace(v, center=v.center.copy(), moments=v.moments.copy()) for v in self.vortices]
        return SystemState(self.t, vs, self.core)


@dataclass(frozen=True)
class DynamicsOptions:
    include_center_advection: bool = True
    tensor_refresh_tolerance: float = 0.0


@dataclass
class Trajectory:
    times: np.ndarray
    centers: np.ndarray   # (samples, vortices, 2)
    moments: np.ndarray   # (samples, vortices, P)
    lam: np.ndarray       # (samples, vortices)
    order: int
    masses: np.ndarray
    flags: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    lambda0: np.ndarray = None

    @property
    def indices(self):
        return hermite_indices(self.order)

    def state(self, i, core):
        lam0 = self.lambda0 if self.lambda0 is not None else [core.lambda0] * len(self.masses)
        vs = [VortexState(self.centers[i, j], MomentSet(self.order, self.moments[i, j]),
                          self.masses[j], None if lam0[j] == core.lambda0 else float(lam0[j]))
              for j in range(len(self.masses))]
        return SystemState(float(self.times[i]), vs, core)


class MomentSystem:
    """Right-hand side of the moment/centre ODEs for a fixed set of vortices."""

    def __init__(self, state, options=None, cache=None):
        self.options = options or DynamicsOptions()
        self.order = state.order
        self.core = state.core
        self.n = len(state.vortices)
        if any(v.moments.order != self.order for v in state.vortices):
            raise ValueError("all vortices must share the truncation order")
        self.masses = np.array([v.mass for v in state.vortices])
        if np.any(self.masses == 0.0):
            raise ValueError("vortex masses must be non-zero")
        lam0 = [v.lambda0 for v in state.vortices]
        if self.order > 0 and any(l is not None and l != self.core.lambda0 for l in lam0):
            raise ValueError("per-vortex core sizes are supported only at order 0")
        self.lambda0 = np.array([self.core.lambda0 if l is None else l for l in lam0])
        self.P = len(hermite_indices(self.order))
        self.cache = cache or TensorCache(self.order, self.options.tensor_refresh_tolerance)
        idx = hermite_indices(self.order)
        pos = {k: i for i, k in enumerate(idx)}
        self._shift1 = np.array([pos.get((k1 - 1, k2), -1) for k1, k2 in idx])
        self._shift2 = np.array([pos.get((k1, k2 - 1), -1) for k1, k2 in idx])
        self._deg = np.array([k1 + k2 for k1, k2 in idx])

    # state vector: [centers (n*2), moments (n*P)]
    def pack(self, state):
        return np.concatenate([np.concatenate([v.center for v in state.vortices]),
                               np.concatenate([v.moments.coeffs for v in state.vortices])])

    def unpack(self, t, y):
        centers = y[:2 * self.n].reshape(self.n, 2)
        moments = y[2 * self.n:].reshape(self.n, self.P)
        vs = [VortexState(centers[j].copy(), MomentSet(self.order, moments[j].copy()),
                          self.masses[j],
                          None if self.lambda0[j] == self.core.lambda0 else self.lambda0[j])
              for j in range(self.n)]
        return SystemState(t, vs, self.core)

    def lam(self, t):
        return np.sqrt(self.lambda0 ** 2 + 4.0 * self.core.nu * t)

    def _pair_tensors(self, j, jp, centers, lams):
        lam = np.sqrt(0.5 * (lams[j] ** 2 + lams[jp] ** 2))
        if j <= jp:
            return self.cache.get((j, jp), separation(centers[j], centers[jp]), lam)
        return self.cache.get((jp, j), separation(centers[jp], centers[j]), lam).reflected()

    def rates(self, t, centers, moments):
        """``(dx/dt, dM/dt)`` as arrays of shape ``(n, 2)`` and ``(n, P)``."""
        lams = self.lam(t)
        xdot = np.zeros((self.n, 2))
        mdot = np.zeros((self.n, self.P))
        for j in range(self.n):
            for jp in range(self.n):
                T = self._pair_tensors(j, jp, centers, lams)
                Mj, Mjp = moments[j], moments[jp]
                if self.order > 0:
                    mdot[j] += (T.gamma @ Mjp) @ Mj
                xdot[j] += np.einsum("lmi,l,m->i", T.xi, Mj, Mjp)
            xdot[j] /= self.masses[j]
        if self.order > 0:
            lam = lams[0]
            pref = np.array([projection_prefactor(k, lam) for k in hermite_indices(self.order)])
            mdot *= -pref
            if self.options.include_center_advection:
                for j in range(self.n):
                    m = moments[j]
                    mdot[j] += np.where(self._shift1 >= 0, xdot[j, 0] * m[self._shift1], 0.0)
                    mdot[j] += np.where(self._shift2 >= 0, xdot[j, 1] * m[self._shift2], 0.0)
        return xdot, mdot

    def __call__(self, t, y):
        centers = y[:2 * self.n].reshape(self.n, 2)
        moments = y[2 * self.n:].reshape(self.n, self.P)
        xdot, mdot = self.rates(t, centers, moments)
        return np.concatenate([xdot.ravel(), mdot.ravel()])


def _system_for(state, options):
    return MomentSystem(state, options)


def moment_rhs(state, options=None, system=None):
    """Per-vortex ``dM^j/dt`` arrays (graded layout)."""
    system = system or _system_for(state, options)
    y = system.pack(state)
    _, mdot = system.rates(state.t, y[:2 * system.n].reshape(-1, 2),
                           y[2 * system.n:].reshape(system.n, system.P))
    return mdot


def center_rhs(state, options=None, system=None):
    """Per-vortex ``dx^j/dt`` as an ``(n, 2)`` array."""
    system = system or _system_for(state, options)
    y = system.pack(state)
    xdot, _ = system.rates(state.t, y[:2 * system.n].reshape(-1, 2),
                           y[2 * system.n:].reshape(system.n, system.P))
    return xdot


def integrate(state, T, dt, options=None, sample_every=1, monitor=None, system=None):
    """Classical RK4 from ``state.t`` over a duration ``T``.

    ``monitor`` is an optional callable ``monitor(state) -> row`` applied to
    every sample; rows land in ``Trajectory.diagnostics``.  A non-finite state
    raises :class:`NumericalAbort` carrying the last good state.
    """
    system = system or MomentSystem(state, options)
    nsteps = step_count(T, dt)
    h = T / nsteps if nsteps else 0.0
    y = system.pack(state)
    t0 = state.t
    n, P = system.n, system.P
    times, cs, ms, lams, rows, flags = [], [], [], [], [], []

    def record(step, y):
        t = t0 + step * h
        times.append(t)
        cs.append(y[:2 * n].reshape(n, 2).copy())
        ms.append(y[2 * n:].reshape(n, P).copy())
        lams.append(system.lam(t))
        if monitor is not None:
            rows.append(monitor(system.unpack(t, y)))

    record(0, y)
    for step in range(1, nsteps + 1):
        t = t0 + (step - 1) * h
        y_new = rk4_step(system, t, y, h)
        if not np.all(np.isfinite(y_new)):
            raise NumericalAbort(f"non-finite state at t={t + h:.6g}", t, system.unpack(t, y))
        drift = np.abs(y_new[2 * n::P] - system.masses).max()
        if drift > MASS_DRIFT_LIMIT:
            flags.append((t + h, f"M[0,0] drift {drift:.3e}; step may be too large"))
            log.warning("M[0,0] drift %.3e at t=%.6g", drift, t + h)
        y = y_new
        if step % sample_every == 0 or step == nsteps:
            record(step, y)
    return Trajectory(np.array(times), np.array(cs), np.array(ms), np.array(lams),
                      system.order, system.masses.copy(), flags, rows, system.lambda0.copy())


def decompose_initial(components, core, order, grid=None):
    """Build a :class:`SystemState` from one vorticity field per vortex.

    Each component is a :class:`GridField` or a callable sampled on ``grid``.
    Mass and centre come from grid sums; moments are projected about the
    centre, so ``M[1,0] = M[0,1] = 0`` up to quadrature error.
    """
    vortices = []
    for i, comp in enumerate(components):
        if not isinstance(comp, GridField):
            if grid is None:
                raise ValueError("callable components need a sampling grid")
            comp = grid.with_values(comp(grid.points()))
        mass = comp.integral()
        if abs(mass) <= ZERO_MASS_RTOL * comp.integral(np.sign(comp.values)):
            raise ValueError(f"component {i} has zero total vorticity")
        pts = comp.points()
        center = np.array([comp.integral(pts[..., 0]), comp.integral(pts[..., 1])]) / mass
        coeffs = project_moments(comp, order, core.lambda0, center)
        coeffs[0] = mass
        if order >= 1:
            coeffs[1] = coeffs[2] = 0.0
        vortices.append(VortexState(center, MomentSet(order, coeffs), mass))
    return SystemState(0.0, vortices, core)
