"""JSON scenario files: parsing, validation and conversion to engine objects."""

from __future__ import annotations

import copy
import json
import math

from .dynamics import DynamicsOptions, MomentSet, SystemState, VortexState
from .hermite_basis import CoreParams

__all__ = ["ConfigError", "TEMPLATE", "load_scenario", "resolve", "build_state", "build_options",
           "parse_index"]


class ConfigError(ValueError):
    """Invalid scenario; the message names the offending field."""


TEMPLATE = {
    "_comment": "Equal co-rotating pair of Gaussian vortices. Keys starting with _ are ignored.",
    "core": {"lambda0": 0.01, "nu": 0.01,
             "_comment": "shared initial core size and viscosity; lambda(t)^2 = lambda0^2 + 4 nu t"},
    "order": 0,
    "_order": "truncation order N; moments M[k1,k2] with k1 + k2 <= N are evolved",
    "vortices": [
        {"mass": 1.0, "center": [1.0, 0.0], "moments": {},
         "_comment": "moments maps 'k1,k2' to M[k1,k2]; M[0,0] is the mass"},
        {"mass": 1.0, "center": [-1.0, 0.0], "moments": {}},
    ],
    "integrator": {"dt": 0.1, "T": 100.0, "sample_every": 10},
    "options": {"include_center_advection": True, "tensor_refresh_tolerance": 0.0,
                "diagnostics_quadrature": True},
    "outputs": {"directory": "output", "formats": ["csv"]},
    "oracle": {"grid": 256, "half_width": 16.0, "dt": None},
    "tensors": {"s": [1.0, 0.0], "lambda": 1.0},
}

DEFAULTS = {k: v for k, v in TEMPLATE.items() if k in ("integrator", "options", "outputs",
                                                      "oracle", "tensors")}


def _strip(obj):
    if isinstance(obj, dict):
        return {k: _strip(v) for k, v in obj.items() if not k.startswith("_")}
    if isinstance(obj, list):
        return [_strip(v) for v in obj]
    return obj


def parse_index(key):
    try:
        k1, k2 = (int(p) for p in str(key).split(","))
    except ValueError:
        raise ConfigError(f"moment key {key!r} must look like 'k1,k2'") from None
    if k1 < 0 or k2 < 0:
        raise ConfigError(f"moment key {key!r} has a negative index")
    return k1, k2


def _number(value, name, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number")
    if positive and not value > 0:
        raise ConfigError(f"{name} must be positive")
    if nonneg and value < 0:
        raise ConfigError(f"{name} must be non-negative")
    return float(value)


def resolve(raw):
    """Validated scenario dict with defaults filled in."""
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a JSON object")
    cfg = _strip(raw)
    out = {}
    core = cfg.get("core")
    if not isinstance(core, dict):
        raise ConfigError("core must be an object with lambda0 and nu")
    out["core"] = {"lambda0": _number(core.get("lambda0"), "core.lambda0", positive=True),
                   "nu": _number(core.get("nu", 0.0), "core.nu", nonneg=True)}
    order = cfg.get("order", 0)
    if isinstance(order, bool) or not isinstance(order, int) or order < 0:
        raise ConfigError("order must be a non-negative integer")
    out["order"] = order
    vortices = cfg.get("vortices")
    if not isinstance(vortices, list) or not vortices:
        raise ConfigError("vortices must be a non-empty list")
    vs = []
    for i, v in enumerate(vortices):
        name = f"vortices[{i}]"
        if not isinstance(v, dict):
            raise ConfigError(f"{name} must be an object")
        mass = _number(v.get("mass"), f"{name}.mass")
        if mass == 0.0:
            raise ConfigError(f"{name}.mass must be non-zero")
        center = v.get("center")
        if not isinstance(center, list) or len(center) != 2:
            raise ConfigError(f"{name}.center must be a list of two numbers")
        center = [_number(c, f"{name}.center") for c in center]
        moments = {}
        for key, val in (v.get("moments") or {}).items():
            k = parse_index(key)
            if sum(k) > order:
                raise ConfigError(f"{name}.moments[{key}] exceeds order {order}")
            if k == (0, 0) and val != mass:
                raise ConfigError(f"{name}.moments['0,0'] must equal the mass")
            moments[f"{k[0]},{k[1]}"] = _number(val, f"{name}.moments[{key}]")
        lam0 = v.get("lambda0")
        if lam0 is not None:
            lam0 = _number(lam0, f"{name}.lambda0", positive=True)
            if order > 0 and lam0 != out["core"]["lambda0"]:
                raise ConfigError(f"{name}.lambda0: per-vortex cores need order 0")
        vs.append({"mass": mass, "center": center, "moments": moments, "lambda0": lam0})
    out["vortices"] = vs
    for section, defaults in DEFAULTS.items():
        given = cfg.get(section, {})
        if not isinstance(given, dict):
            raise ConfigError(f"{section} must be an object")
        unknown = set(given) - set(defaults)
        if unknown:
            raise ConfigError(f"{section}.{sorted(unknown)[0]} is not a recognised field")
        out[section] = {**copy.deepcopy(defaults), **given}
    it = out["integrator"]
    it["dt"] = _number(it["dt"], "integrator.dt", positive=True)
    it["T"] = _number(it["T"], "integrator.T", positive=True)
    se = it["sample_every"]
    if isinstance(se, bool) or not isinstance(se, int) or se < 1:
        raise ConfigError("integrator.sample_every must be a positive integer")
    opt = out["options"]
    for key in ("include_center_advection", "diagnostics_quadrature"):
        if not isinstance(opt[key], bool):
            raise ConfigError(f"options.{key} must be true or false")
    opt["tensor_refresh_tolerance"] = _number(opt["tensor_refresh_tolerance"],
                                              "options.tensor_refresh_tolerance", nonneg=True)
    orc = out["oracle"]
    if isinstance(orc["grid"], bool) or not isinstance(orc["grid"], int) or orc["grid"] < 8:
        raise ConfigError("oracle.grid must be an integer >= 8")
    orc["half_width"] = _number(orc["half_width"], "oracle.half_width", positive=True)
    if orc["dt"] is not None:
        orc["dt"] = _number(orc["dt"], "oracle.dt", positive=True)
    ten = out["tensors"]
    if not isinstance(ten["s"], list) or len(ten["s"]) != 2:
        raise ConfigError("tensors.s must be a list of two numbers")
    ten["s"] = [_number(c, "tensors.s") for c in ten["s"]]
    ten["lambda"] = _number(ten["lambda"], "tensors.lambda", positive=True)
    return out


def load_scenario(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    return resolve(raw)


def build_state(cfg):
    core = CoreParams(cfg["core"]["lambda0"], cfg["core"]["nu"])
    vortices = []
    for v in cfg["vortices"]:
        ms = MomentSet.gaussian(cfg["order"], v["mass"])
        for key, val in v["moments"].items():
            ms[parse_index(key)] = val
        vortices.append(VortexState(v["center"], ms, v["mass"], v["lambda0"]))
    return SystemState(0.0, vortices, core)


def build_options(cfg):
    opt = cfg["options"]
    return DynamicsOptions(opt["include_center_advection"], opt["tensor_refresh_tolerance"])
