"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import csv
import functools
import json
import math
import time
import warnings

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from hermite_vortex.cli import main as cli_main
from hermite_vortex.diagnostics import Monitor
from hermite_vortex.dynamics import (
    DynamicsOptions,
    MomentSet,
    MomentSystem,
    SystemState,
    VortexState,
    center_rhs,
    integrate,
)
from hermite_vortex.fields import GridField, eval_vorticity, gamma_by_quadrature, project_moment, project_moments
from hermite_vortex.hermite_basis import CoreParams, basis_norm_sq, gaussian_phi00, hermite_function, hermite_indices
from hermite_vortex.reference import (
    PointVortexSystem,
    angular_rate,
    integrate_point_vortices,
    rotation_frequency_new,
)
from hermite_vortex.spectral import SpectralSolver
from hermite_vortex.tensors import TensorCache, build_gamma


class AuditCache(TensorCache):
    """Tensor cache that remembers the largest conservation-row entry it served."""

    worst = 0.0
    served = 0

    def get(self, key, s, lam):
        entry = super().get(key, s, lam)
        AuditCache.worst = max(AuditCache.worst, float(np.abs(entry.gamma[0]).max()))
        AuditCache.served += 1
        return entry


class Run:
    def __init__(self, state, T, dt, sample_every=1, options=None):
        self.state = state
        self.system = MomentSystem(state, options, cache=AuditCache(state.order))
        self.monitor = Monitor(state)
        start = time.perf_counter()
        self.traj = integrate(state, T, dt, options, sample_every, monitor=self.monitor,
                              system=self.system)
        self.elapsed = time.perf_counter() - start


RUNS = {}


def run(name):
    if name not in RUNS:
        RUNS[name] = SCENARIOS[name]()
    return RUNS[name]


def vortex(center, order, mass, extra=None, lambda0=None):
    return VortexState(center, MomentSet.gaussian(order, mass, extra), lambda0=lambda0)


def revolution_time(lam0, nu):
    def angle(T):
        return quad(lambda t: rotation_frequency_new(1.0, 1.0, math.sqrt(lam0 ** 2 + 4 * nu * t)),
                    0.0, T, epsabs=1e-13, epsrel=1e-13)[0] - 2 * math.pi

    return brentq(angle, 50.0, 500.0, xtol=1e-12)


T_CIRCLE = revolution_time(0.1, 0.01)
PERTURBATION = {(2, 0): 0.1, (0, 2): -0.1}


def _oseen():
    state = SystemState(0.0, [vortex((0.0, 0.0), 4, 1.0)], CoreParams(1.0, 0.02))
    return Run(state, 10.0, 0.01)


def _circle(dt=0.05, sample_every=10):
    state = SystemState(0.0, [vortex((1.0, 0.0), 0, 1.0), vortex((-1.0, 0.0), 0, 1.0)],
                        CoreParams(0.1, 0.01))
    return Run(state, T_CIRCLE, dt, sample_every)


def _line():
    state = SystemState(0.0, [vortex((1.0, 0.0), 0, 1.0), vortex((-1.0, 0.0), 0, -1.0)],
                        CoreParams(0.1, 0.01))
    return Run(state, 10.0, 0.05)


def _point():
    state = SystemState(0.0, [vortex((1.0, 0.0), 0, 1.0), vortex((-1.0, 0.0), 0, 1.0)],
                        CoreParams(1e-3, 0.0))
    return Run(state, 8 * math.pi ** 2, 8 * math.pi ** 2 / 800, 4)


def _multi():
    state = SystemState(0.0, [vortex((0.0, 0.0), 2, 1.0, {(2, 0): 0.05, (1, 1): -0.02}),
                              vortex((2.0, 0.5), 2, 0.5, {(0, 2): 0.03}),
                              vortex((-1.0, 1.8), 2, -0.3, {(1, 1): 0.01})],
                        CoreParams(0.5, 0.01))
    return Run(state, 5.0, 0.02, options=DynamicsOptions(include_center_advection=True))


def _perturbed(order):
    state = SystemState(0.0, [vortex((0.0, 0.0), order, 1.0, PERTURBATION)], CoreParams(1.0, 0.02))
    return Run(state, 1.0, 0.01, 10)


def _pde_oseen():
    state = SystemState(0.0, [vortex((0.0, 0.0), 4, 1.0)], CoreParams(1.0, 0.02))
    return Run(state, 1.0, 0.01, 10)


SCENARIOS = {
    "oseen": _oseen,
    "circle": _circle,
    "line": _line,
    "point": _point,
    "multi": _multi,
    "pde2": lambda: _perturbed(2),
    "pde4": lambda: _perturbed(4),
    "pde_oseen": _pde_oseen,
}

# the spectral oracle box for the field comparisons
ORACLE_HALF_WIDTH = 32.0
ORACLE_GRID = 512


@functools.cache
def spectral_final(initial_name):
    state = run(initial_name).state
    grid = GridField.square(ORACLE_HALF_WIDTH, ORACLE_GRID)
    initial = grid.with_values(eval_vorticity(state, grid.points()))
    start = time.perf_counter()
    res = SpectralSolver(initial, state.core.nu).run(1.0, 0.01)
    return res.final, time.perf_counter() - start


def test_criterion_01_oseen_fixed_point(criterion):
    r = run("oseen")
    higher = np.abs(r.traj.moments[:, 0, 1:]).sum(-1).max()
    ok = higher < 1e-10 and r.elapsed < 10.0 and len(r.traj.times) == 1001
    criterion(1, ok, f"max sum |M[k]|, |k|>=1: {higher:.2e} (< 1e-10); runtime {r.elapsed:.1f} s (< 10 s)")
    assert ok


def test_criterion_02_conservation_row(criterion):
    built = 0.0
    for N in range(5):
        for s in [(0.0, 0.0), (1.0, 0.0), (-0.3, 0.7), (2.5, -1.5)]:
            for lam in (0.1, 1.0, 2.0):
                built = max(built, float(np.abs(build_gamma(N, s, lam)[0]).max()))
    drift = 0.0
    for name in SCENARIOS:
        r = run(name)
        drift = max(drift, float(np.abs(r.traj.moments[:, :, 0] - r.traj.masses).max()))
    ok = built == 0.0 and AuditCache.worst == 0.0 and drift < 1e-10
    criterion(2, ok, f"max |Gamma[0;l;m]| = {max(built, AuditCache.worst):.1e} over direct builds and "
                     f"{AuditCache.served} served tensors; max |M[0,0] - m| = {drift:.1e} (< 1e-10)")
    assert ok


def test_criterion_03_cross_oracle_gamma(criterion):
    start = time.perf_counter()
    idx = hermite_indices(4)
    worst = 0.0
    count = 0
    for s in [(0.0, 0.0), (1.0, 0.0)]:
        g = build_gamma(4, s, 1.0)
        for i, k in enumerate(idx):
            for j, l in enumerate(idx):
                for m_, m in enumerate(idx):
                    if sum(k) + sum(l) + sum(m) > 4:
                        continue
                    q = gamma_by_quadrature(k, l, m, s, 1.0)
                    worst = max(worst, abs(g[i, j, m_] - q) / max(1e-6 * abs(q), 1e-10))
                    count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1.0 and elapsed < 60.0
    criterion(3, ok, f"{count} entries, worst error / tolerance {worst:.2e} (<= 1); "
                     f"runtime {elapsed:.1f} s (< 60 s)")
    assert ok


def test_criterion_04_orthogonality(criterion):
    idx = hermite_indices(4)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for m in idx:
            f = functools.partial(lambda x, m: hermite_function(m, x, 1.0), m=m)
            for k in idx:
                worst = max(worst, abs(project_moment(f, k, 1.0) - (k == m)))
    ok = worst < 1e-8
    criterion(4, ok, f"max |P_k(phi_m) - delta| = {worst:.1e} (< 1e-8)")
    assert ok


def test_criterion_05_circular_orbit(criterion):
    r = run("circle")
    c = r.traj.centers
    sep = c[:, 1] - c[:, 0]
    radius = np.hypot(sep[:, 0], sep[:, 1])
    drift = float(np.abs(radius - 2.0).max())
    worst = 0.0
    for i in range(len(r.traj.times)):
        st = r.traj.state(i, r.state.core)
        v = center_rhs(st, system=r.system)
        rate = angular_rate(c[i, 0], c[i, 1], v[0], v[1])
        expected = rotation_frequency_new(1.0, radius[i] / 2, st.lam)
        worst = max(worst, abs(rate / expected - 1))
    turned = np.unwrap(np.arctan2(sep[:, 1], sep[:, 0]))
    revolution = (turned[-1] - turned[0]) / (2 * math.pi)
    ok = drift < 1e-8 and worst < 1e-9 and abs(revolution - 1) < 1e-6
    criterion(5, ok, f"radius drift {drift:.1e} (< 1e-8); rate vs formula {worst:.1e} (< 1e-9); "
                     f"turns {revolution:.8f} over T = {T_CIRCLE:.4f}")
    assert ok


def test_criterion_06_straight_line(criterion):
    r = run("line")
    c = r.traj.centers
    v0 = center_rhs(r.state, system=r.system)[0]
    normal = np.array([-v0[1], v0[0]]) / np.hypot(*v0)
    lateral = float(max(np.abs((c[:, j] - c[0, j]) @ normal).max() for j in range(2)))
    travelled = float(np.hypot(*(c[-1, 0] - c[0, 0])))
    ok = lateral < 1e-8 and travelled > 0.5
    criterion(6, ok, f"lateral deviation {lateral:.1e} (< 1e-8) over a distance of {travelled:.3f}")
    assert ok


def _period(times, sep):
    turned = np.unwrap(np.arctan2(sep[:, 1], sep[:, 0]))
    turned = np.abs(turned - turned[0])
    i = np.searchsorted(turned, 2 * math.pi)
    if i >= len(turned):
        i = len(turned) - 1
    a, b = turned[i - 1], turned[i]
    return times[i - 1] + (2 * math.pi - a) / (b - a) * (times[i] - times[i - 1])


def test_criterion_07_point_vortex_limit(criterion):
    r = run("point")
    period = 8 * math.pi ** 2
    pv = PointVortexSystem([(1.0, 0.0), (-1.0, 0.0)], [1.0, 1.0])
    times, xs = integrate_point_vortices(pv, period, period / 800)
    xs = xs[::4]
    gap = float(np.abs(r.traj.centers - xs).max())
    # run slightly past one turn so the crossing is bracketed
    extra = integrate_point_vortices(pv, 1.01 * period, period / 800)
    longer = Run(r.state, 1.01 * period, period / 800, 1)
    p_engine = _period(longer.traj.times, longer.traj.centers[:, 1] - longer.traj.centers[:, 0])
    p_point = _period(extra[0], extra[1][:, 1] - extra[1][:, 0])
    e1, e2 = abs(p_engine / period - 1), abs(p_point / period - 1)
    ok = gap < 1e-4 and e1 < 1e-3 and e2 < 1e-3
    criterion(7, ok, f"engine vs point vortices {gap:.1e} (< 1e-4); period error engine {e1:.1e}, "
                     f"point vortices {e2:.1e} (< 1e-3)")
    assert ok


def test_criterion_08_figure_reproduction(criterion, tmp_path):
    cfg = {"core": {"lambda0": 0.01, "nu": 0.01}, "order": 0,
           "vortices": [{"mass": 1.0, "center": [1.0, 0.0]}, {"mass": 1.0, "center": [-1.0, 0.0]}],
           "integrator": {"dt": 0.1, "T": 100.0, "sample_every": 10}}
    path = tmp_path / "fig.json"
    path.write_text(json.dumps(cfg))
    start = time.perf_counter()
    code = cli_main(["compare-frequency", "--config", str(path), "--output-dir", str(tmp_path), "--quiet"])
    elapsed = time.perf_counter() - start
    with open(tmp_path / "frequency.csv") as fh:
        data = list(csv.DictReader(fh))
    t = np.array([float(d["t"]) for d in data])
    new = np.array([float(d["omega_new"]) for d in data])
    old = np.array([float(d["omega_quadrupole"]) for d in data])
    target = 1 / (4 * math.pi)
    start_err = max(abs(new[0] / target - 1), abs(old[0] / target - 1))
    gap = np.abs(new - old) / new
    ok = (code == 0 and t[0] == 0.0 and abs(t[-1] - 100.0) < 1e-9 and start_err < 1e-4
          and gap.max() < 0.1 and elapsed < 5.0)
    criterion(8, ok, f"t=0 error {start_err:.1e} (< 1e-4); max relative gap {gap.max():.3f} at "
                     f"t={t[gap.argmax()]:.0f} (< 0.1), at t=100 {gap[-1]:.3f}; runtime {elapsed:.1f} s (< 5 s)")
    assert ok


def _moment_error(name):
    r = run(name)
    final, _ = spectral_final("pde2")
    st = r.traj.state(len(r.traj.times) - 1, r.state.core)
    v = st.vortices[0]
    lam = st.lam
    ref = project_moments(final, 2, lam, v.center)
    err = 0.0
    for k, a, b in zip(hermite_indices(2), v.moments.coeffs, ref):
        err += (a - b) ** 2 * basis_norm_sq(k, lam)
    return math.sqrt(err)


def test_criterion_09_pde_fidelity(criterion):
    e2 = _moment_error("pde2")
    e4 = _moment_error("pde4")
    final, t_pert = spectral_final("pde2")
    oseen, t_oseen = spectral_final("pde_oseen")
    r = run("pde_oseen")
    st = r.traj.state(len(r.traj.times) - 1, r.state.core)
    model = eval_vorticity(st, oseen.points())
    field_err = float(np.sqrt(((model - oseen.values) ** 2).sum() * oseen.spacing ** 2))
    exact = gaussian_phi00(oseen.points(), st.lam)
    exact_err = float(np.sqrt(((exact - model) ** 2).sum() * oseen.spacing ** 2))
    total = t_pert + t_oseen + sum(run(n).elapsed for n in ("pde2", "pde4", "pde_oseen"))
    ok = e4 < e2 and field_err < 1e-6 and exact_err < 1e-12 and total < 300
    criterion(9, ok, f"moment error order 4 {e4:.3e} < order 2 {e2:.3e}; Oseen field error "
                     f"{field_err:.1e} (< 1e-6); runtime {total:.1f} s at {ORACLE_GRID}^2 (< 300 s)")
    assert ok


def test_criterion_10_first_moments(criterion):
    worst = 0.0
    for name in ("multi", "circle", "line", "point"):
        m = run(name).traj.moments
        if m.shape[-1] > 1:
            worst = max(worst, float(np.abs(m[:, :, 1:3]).max()))
    ok = worst < 1e-8
    criterion(10, ok, f"max |M[1,0]|, |M[0,1]| over multi-vortex runs {worst:.1e} (< 1e-8)")
    assert ok


def test_criterion_11_enstrophy_monitor(criterion):
    rows = 0
    problems = []
    for name in SCENARIOS:
        r = run(name)
        for row in r.monitor.rows:
            rows += 1
            if not row.is_finite() or not np.all(row.converged) or np.any(row.enstrophy < 0):
                problems.append(f"{name} t={row.t:.3g}")
            problems.extend(f"{name}: {f}" for f in row.flags)
        problems.extend(f"{name}: {msg}" for _, msg in r.traj.flags)
    ok = not problems and rows > 0
    criterion(11, ok, f"{rows} monitored samples over {len(SCENARIOS)} runs, "
                      f"{len(problems)} flagged" + (f" ({problems[0]})" if problems else ""))
    assert ok


def test_criterion_12_rk4_order(criterion):
    def final(dt):
        r = _circle(dt=dt, sample_every=10 ** 9)
        return r.traj.centers[-1]

    base = T_CIRCLE / 200
    ref = final(base / 8)
    e1 = float(np.abs(final(base) - ref).max())
    e2 = float(np.abs(final(base / 2) - ref).max())
    ratio = e1 / e2
    ok = ratio >= 12.0
    criterion(12, ok, f"error {e1:.2e} at dt={base:.3f}, {e2:.2e} at dt/2; ratio {ratio:.1f} (>= 12)")
    assert ok
