"""Command-line runner for scenario files.

    hermite-vortex template --output-dir runs/
    hermite-vortex simulate --config runs/scenario.json --output-dir runs/pair
    hermite-vortex compare-frequency --config runs/scenario.json

Exit codes: 0 success, 2 invalid configuration, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import warnings

import numpy as np

from . import __version__
from .diagnostics import Monitor
from .dynamics import MomentSystem, center_rhs, integrate
from .fields import GridField, eval_vorticity, project_moments
from .hermite_basis import hermite_indices
from .integrate import NumericalAbort
from .reference import angular_rate, rotation_frequency_new, rotation_frequency_quadrupole
from .scenario import TEMPLATE, ConfigError, build_options, build_state, load_scenario, resolve
from .spectral import CFLViolation, SpectralSolver
from .tensors import build_tensors

log = logging.getLogger("hermite_vortex")

EXIT_OK, EXIT_CONFIG, EXIT_ABORT = 0, 2, 3


def fmt(x):
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    log.info("wrote %s", path)


def _moment_names(order):
    return [f"M_{k1}_{k2}" for k1, k2 in hermite_indices(order)]


def _output_dir(args, cfg):
    path = args.output_dir or cfg["outputs"]["directory"]
    os.makedirs(path, exist_ok=True)
    return path


def _write_manifest(out, cfg, command, extra=None):
    manifest = {"command": command, "version": __version__, "config": cfg}
    manifest.update(extra or {})
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_simulate(cfg, out):
    state = build_state(cfg)
    it = cfg["integrator"]
    mon = Monitor(state, quadrature=cfg["options"]["diagnostics_quadrature"])
    traj = integrate(state, it["T"], it["dt"], build_options(cfg), it["sample_every"], monitor=mon)
    n = len(state.vortices)
    header = ["t"] + [f"lambda_{j}" for j in range(n)]
    header += [f"x{c}_{j}" for j in range(n) for c in (1, 2)]
    rows = [[t, *lam, *c.ravel()] for t, lam, c in zip(traj.times, traj.lam, traj.centers)]
    write_csv(os.path.join(out, "trajectory.csv"), header, rows)
    rows = [[t, str(j), *traj.moments[i, j]] for i, t in enumerate(traj.times) for j in range(n)]
    write_csv(os.path.join(out, "moments.csv"), ["t", "vortex"] + _moment_names(traj.order), rows)
    drows = [r.as_dict() for r in traj.diagnostics]
    write_csv(os.path.join(out, "diagnostics.csv"), list(drows[0]),
              [list(r.values()) for r in drows])
    flags = traj.flags + [(r.t, f) for r in traj.diagnostics for f in r.flags]
    for t, msg in flags:
        log.warning("t=%s: %s", fmt(t), msg)
    _write_manifest(out, cfg, "simulate", {"flags": [[fmt(t), m] for t, m in flags]})
    return traj


def run_tensors(cfg, out):
    ten = cfg["tensors"]
    T = build_tensors(cfg["order"], ten["s"], ten["lambda"])
    idx = hermite_indices(cfg["order"])
    rows = [[str(a) for a in (*idx[k], *idx[l], *idx[m])] + [T.gamma[k, l, m]]
            for k in range(len(idx)) for l in range(len(idx)) for m in range(len(idx))]
    write_csv(os.path.join(out, "gamma.csv"), ["k1", "k2", "l1", "l2", "m1", "m2", "value"], rows)
    rows = [[str(a) for a in (*idx[l], *idx[m])] + list(T.xi[l, m])
            for l in range(len(idx)) for m in range(len(idx))]
    write_csv(os.path.join(out, "xi.csv"), ["l1", "l2", "m1", "m2", "xi1", "xi2"], rows)
    _write_manifest(out, cfg, "tensors")
    return T


def _oracle_grid(cfg):
    orc = cfg["oracle"]
    return GridField.square(orc["half_width"], orc["grid"])


def run_project(cfg, out):
    """Sample each configured vortex on the oracle grid and project it back."""
    from .dynamics import decompose_initial

    state = build_state(cfg)
    grid = _oracle_grid(cfg)
    pts = grid.points()
    comps = []
    for j in range(len(state.vortices)):
        single = type(state)(0.0, [state.vortices[j]], state.core)
        comps.append(grid.with_values(eval_vorticity(single, pts)))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        proj = decompose_initial(comps, state.core, cfg["order"])
    for w in caught:
        log.warning("%s", w.message)
    rows, centers = [], []
    for j, (v, p) in enumerate(zip(state.vortices, proj.vortices)):
        centers.append([str(j), *p.center, *v.center])
        for k, a, b in zip(v.moments.indices, v.moments.coeffs, p.moments.coeffs):
            rows.append([str(j), str(k[0]), str(k[1]), b, a, b - a])
    write_csv(os.path.join(out, "projection.csv"),
              ["vortex", "k1", "k2", "value", "configured", "error"], rows)
    write_csv(os.path.join(out, "centers.csv"),
              ["vortex", "x1", "x2", "configured_x1", "configured_x2"], centers)
    _write_manifest(out, cfg, "project")
    return proj


def run_compare_frequency(cfg, out):
    state = build_state(cfg)
    if len(state.vortices) != 2:
        raise ConfigError("vortices: compare-frequency needs exactly two vortices")
    v1, v2 = state.vortices
    sep = v2.center - v1.center
    r = 0.5 * float(np.hypot(*sep))
    if v1.mass != v2.mass or np.any(v1.moments.coeffs != v2.moments.coeffs):
        log.warning("scenario is not a symmetric pair; measured curve may differ from the formulas")
    M = v1.mass
    nu = state.core.nu
    lam0 = state.core.lambda0
    it = cfg["integrator"]
    options = build_options(cfg)
    system = MomentSystem(state, options)
    traj = integrate(state, it["T"], it["dt"], options, it["sample_every"], system=system)
    rows = []
    for i, t in enumerate(traj.times):
        st = traj.state(i, state.core)
        vel = center_rhs(st, system=system)
        measured = angular_rate(st.vortices[0].center, st.vortices[1].center, vel[0], vel[1])
        lam = st.lam
        rows.append([t, rotation_frequency_new(M, r, lam),
                     rotation_frequency_quadrupole(M, r, lam0, nu, t), measured])
    write_csv(os.path.join(out, "frequency.csv"),
              ["t", "omega_new", "omega_quadrupole", "omega_measured"], rows)
    _write_manifest(out, cfg, "compare-frequency", {"r": r, "M": M})
    return np.array(rows)


def run_oracle_compare(cfg, out):
    state = build_state(cfg)
    grid = _oracle_grid(cfg)
    it = cfg["integrator"]
    traj = integrate(state, it["T"], it["dt"], build_options(cfg), it["sample_every"])
    initial = grid.with_values(eval_vorticity(state, grid.points()))
    try:
        solver = SpectralSolver(initial, state.core.nu)
    except ValueError as exc:
        raise ConfigError(f"oracle.half_width: {exc}") from None
    dt = cfg["oracle"]["dt"] or it["dt"]
    res = solver.run(it["T"], dt, sample_times=list(traj.times))
    snaps = dict(zip(np.round(res.times, 9), res.snapshots))
    field_rows, moment_rows = [], []
    h2 = grid.spacing ** 2
    for i, t in enumerate(traj.times):
        snap = snaps.get(np.round(t, 9))
        if snap is None:
            continue
        st = traj.state(i, state.core)
        model = eval_vorticity(st, grid.points())
        err = float(np.sqrt(((model - snap.values) ** 2).sum() * h2))
        norm = float(np.sqrt((snap.values ** 2).sum() * h2))
        field_rows.append([t, err, norm])
        for j, v in enumerate(st.vortices):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                ref = project_moments(snap, traj.order, st.lam_of(j), v.center)
            for k, a, b in zip(v.moments.indices, v.moments.coeffs, ref):
                moment_rows.append([t, str(j), str(k[0]), str(k[1]), a, b, a - b])
    write_csv(os.path.join(out, "oracle_fields.csv"), ["t", "l2_error", "l2_norm"], field_rows)
    write_csv(os.path.join(out, "oracle_moments.csv"),
              ["t", "vortex", "k1", "k2", "engine", "oracle", "error"], moment_rows)
    _write_manifest(out, cfg, "oracle-compare", {"oracle_dt": dt})
    return field_rows, moment_rows


def run_template(out):
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "scenario.json")
    with open(path, "w") as fh:
        json.dump(TEMPLATE, fh, indent=2)
        fh.write("\n")
    log.info("wrote %s", path)


COMMANDS = {
    "simulate": run_simulate,
    "tensors": run_tensors,
    "project": run_project,
    "compare-frequency": run_compare_frequency,
    "oracle-compare": run_oracle_compare,
}


def build_parser():
    p = argparse.ArgumentParser(prog="hermite-vortex",
                                description="Hermite-moment vortex dynamics scenarios.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in [*COMMANDS, "template"]:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="scenario JSON file")
        sp.add_argument("--output-dir", help="directory for output files")
        sp.add_argument("--order", type=int, help="override the truncation order")
        sp.add_argument("--dt", type=float, help="override integrator.dt")
        sp.add_argument("--T", type=float, help="override integrator.T")
        sp.add_argument("--quiet", action="store_true", help="only report warnings and errors")
        sp.add_argument("--seedless", action="store_true",
                        help="accepted for symmetry; runs never use random numbers")
    return p


def _apply_overrides(cfg, args):
    raw = json.loads(json.dumps(cfg))
    if args.order is not None:
        raw["order"] = args.order
    if args.dt is not None:
        raw["integrator"]["dt"] = args.dt
    if args.T is not None:
        raw["integrator"]["T"] = args.T
    return resolve(raw)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr, force=True)
    try:
        if args.command == "template":
            run_template(args.output_dir or ".")
            return EXIT_OK
        if not args.config:
            raise ConfigError("--config is required")
        cfg = _apply_overrides(load_scenario(args.config), args)
        out = _output_dir(args, cfg)
        COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        log.error("numerical abort: %s (last good t=%s)", exc, fmt(exc.t))
        return EXIT_ABORT
    except CFLViolation as exc:
        log.error("numerical abort: %s", exc)
        return EXIT_ABORT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
