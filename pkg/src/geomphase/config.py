"""Declarative experiment configuration: JSON documents validated into
ExperimentConfig values.

Validation collects every problem it finds (unknown keys, missing fields,
out-of-range values) instead of stopping at the first one.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from . import models
from .errors import ConfigError

KINDS = (
    "berry-line",
    "berry-surface",
    "wz-holonomy",
    "adiabatic",
    "ab-electric",
    "ab-magnetic",
    "sweep",
)

MODEL_TYPES = ("spin-half", "degenerate-4x4", "custom")


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment: its kind and the raw (validated) document."""

    kind: str
    data: dict
    output: str | None = None

    @property
    def digest(self) -> str:
        canon = json.dumps(self.data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


class _Checker:
    def __init__(self):
        self.errors: list[str] = []

    def fail(self, msg: str):
        self.errors.append(msg)

    def block(self, data: dict, where: str, required: dict, optional: dict) -> bool:
        """Check key presence/absence; returns False when keys are missing."""
        ok = True
        for key in data:
            if key not in required and key not in optional:
                self.fail(f"{where}: unknown key {key!r}")
        for key in required:
            if key not in data:
                self.fail(f"{where}: missing required field {key!r}")
                ok = False
        return ok

    def number(self, data, key, where, *, positive=False, integer=False, minimum=None):
        if key not in data:
            return None
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(f"{where}: {key!r} must be a number")
            return None
        if integer and not isinstance(v, int):
            self.fail(f"{where}: {key!r} must be an integer")
            return None
        if positive and not v > 0:
            self.fail(f"{where}: {key!r} must be positive, got {v}")
            return None
        if minimum is not None and v < minimum:
            self.fail(f"{where}: {key!r} must be at least {minimum}, got {v}")
            return None
        return v


def _check_model(c: _Checker, data, where="model"):
    if not isinstance(data, dict):
        c.fail(f"{where}: must be an object")
        return
    mtype = data.get("type")
    if mtype not in MODEL_TYPES:
        c.fail(f"{where}: type must be one of {MODEL_TYPES}, got {mtype!r}")
        return
    if mtype == "custom":
        if not c.block(data, where, {"type": 1, "generators": 1}, {"offset": 1}):
            return
        try:
            build_model(data)
        except (ValueError, TypeError) as exc:
            c.fail(f"{where}: {exc}")
    else:
        c.block(data, where, {"type": 1}, {})


def _check_band(c: _Checker, data, where="band"):
    if not isinstance(data, dict):
        c.fail(f"{where}: must be an object")
        return
    c.block(data, where, {}, {"index": 1, "energy": 1, "multiplicity": 1})
    if ("index" in data) == ("energy" in data):
        c.fail(f"{where}: set exactly one of 'index' or 'energy'")
    if "index" in data:
        c.number(data, "index", where, integer=True)
    c.number(data, "energy", where)
    c.number(data, "multiplicity", where, integer=True, positive=True)


def _check_theta(c: _Checker, data, key, where):
    v = c.number(data, key, where)
    if v is not None and not 0.0 < v < math.pi:
        c.fail(
            f"{where}: {key!r}={v} lies on or beyond the chart singularity; "
            "it must be inside the open interval (0, pi)"
        )


def _check_path(c: _Checker, data, where="path"):
    if not isinstance(data, dict):
        c.fail(f"{where}: must be an object")
        return
    ptype = data.get("type")
    if ptype == "circle":
        if c.block(data, where, {"type": 1, "radius": 1, "theta": 1, "n": 1}, {}):
            c.number(data, "radius", where, positive=True)
            _check_theta(c, data, "theta", where)
            c.number(data, "n", where, integer=True, minimum=3)
    elif ptype == "explicit":
        if c.block(data, where, {"type": 1, "points": 1}, {"times": 1, "closed": 1}):
            try:
                build_path(data)
            except (ValueError, TypeError) as exc:
                c.fail(f"{where}: {exc}")
    else:
        c.fail(f"{where}: type must be 'circle' or 'explicit', got {ptype!r}")


def _check_contour(c: _Checker, data, where="contour"):
    if not isinstance(data, dict):
        c.fail(f"{where}: must be an object")
        return
    ctype = data.get("type")
    if ctype == "circle":
        if c.block(data, where, {"type": 1, "radius": 1}, {"center": 1, "n": 1, "turns": 1}):
            c.number(data, "radius", where, positive=True)
            c.number(data, "n", where, integer=True, minimum=3)
            turns = c.number(data, "turns", where, integer=True)
            if turns == 0:
                c.fail(f"{where}: 'turns' must be a nonzero integer")
    elif ctype == "polygon":
        if c.block(data, where, {"type": 1, "vertices": 1}, {}):
            try:
                build_contour(data)
            except (ValueError, TypeError) as exc:
                c.fail(f"{where}: {exc}")
    else:
        c.fail(f"{where}: type must be 'circle' or 'polygon', got {ctype!r}")


def _check_numeric(c: _Checker, data, where, allowed: dict):
    if data is None:
        return
    if not isinstance(data, dict):
        c.fail(f"{where}: must be an object")
        return
    c.block(data, where, {}, allowed)
    for key, spec in allowed.items():
        if key in data and spec:
            c.number(data, key, where, **spec)


_NUMERIC_FIELDS = {
    "berry-line": {"band_tol": {"positive": True}, "max_refinements": {"integer": True, "minimum": 0}},
    "berry-surface": {
        "band_tol": {"positive": True},
        "tolerance": {"positive": True},
        "n_theta": {"integer": True, "minimum": 4},
        "n_phi": {"integer": True, "minimum": 4},
        "step": {"positive": True},
        "outer_step": {"positive": True},
    },
    "wz-holonomy": {
        "band_tol": {"positive": True},
        "steps": {"integer": True, "minimum": 4},
        "method": None,
        "reference_point": None,
    },
    "adiabatic": {
        "band_tol": {"positive": True},
        "total_time": {"positive": True},
        "steps": {"integer": True, "minimum": 2},
    },
    "ab-magnetic": {"charge": {}, "mesh": {"integer": True, "minimum": 4}},
}


def _check_kind(c: _Checker, kind: str, doc: dict):
    if kind == "berry-line":
        if c.block(doc, "document", {"kind": 1, "model": 1, "band": 1, "path": 1}, {"numeric": 1, "output": 1}):
            _check_model(c, doc["model"])
            _check_band(c, doc["band"])
            _check_path(c, doc["path"])
        _check_numeric(c, doc.get("numeric"), "numeric", _NUMERIC_FIELDS[kind])
    elif kind == "berry-surface":
        if c.block(doc, "document", {"kind": 1, "model": 1, "band": 1, "cap": 1}, {"numeric": 1, "output": 1}):
            _check_model(c, doc["model"])
            _check_band(c, doc["band"])
            cap = doc["cap"]
            if isinstance(cap, dict):
                if c.block(cap, "cap", {"theta": 1}, {"radius": 1}):
                    _check_theta(c, cap, "theta", "cap")
                    c.number(cap, "radius", "cap", positive=True)
            else:
                c.fail("cap: must be an object")
        _check_numeric(c, doc.get("numeric"), "numeric", _NUMERIC_FIELDS[kind])
    elif kind == "wz-holonomy":
        if c.block(doc, "document", {"kind": 1, "model": 1, "band": 1, "path": 1}, {"numeric": 1, "output": 1}):
            _check_model(c, doc["model"])
            _check_band(c, doc["band"])
            _check_path(c, doc["path"])
        num = doc.get("numeric")
        _check_numeric(c, num, "numeric", _NUMERIC_FIELDS[kind])
        if isinstance(num, dict):
            method = num.get("method", "link")
            if method not in ("link", "ode"):
                c.fail(f"numeric: method must be 'link' or 'ode', got {method!r}")
            ref = num.get("reference_point")
            if ref is not None and not (
                isinstance(ref, list) and all(isinstance(x, (int, float)) for x in ref)
            ):
                c.fail("numeric: reference_point must be a list of numbers")
    elif kind == "adiabatic":
        if c.block(doc, "document", {"kind": 1, "model": 1, "band": 1, "path": 1, "numeric": 1}, {"output": 1}):
            _check_model(c, doc["model"])
            _check_band(c, doc["band"])
            _check_path(c, doc["path"])
            num = doc["numeric"]
            if isinstance(num, dict):
                if "total_time" not in num:
                    c.fail("numeric: missing required field 'total_time'")
                if "steps" not in num:
                    c.fail("numeric: missing required field 'steps'")
            _check_numeric(c, num, "numeric", _NUMERIC_FIELDS[kind])
    elif kind == "ab-electric":
        if c.block(doc, "document", {"kind": 1, "pulses": 1}, {"output": 1}):
            p = doc["pulses"]
            if isinstance(p, dict):
                if c.block(p, "pulses", {"t0": 1, "upper": 1, "lower": 1}, {"charge": 1}):
                    c.number(p, "t0", "pulses", positive=True)
                    c.number(p, "charge", "pulses")
                    up, lo = p.get("upper"), p.get("lower")
                    if not isinstance(up, list) or not isinstance(lo, list):
                        c.fail("pulses: 'upper' and 'lower' must be arrays of samples")
                    elif len(up) != len(lo):
                        c.fail("pulses: 'upper' and 'lower' grids differ in length")
                    elif len(up) < 3:
                        c.fail("pulses: need at least 3 samples")
            else:
                c.fail("pulses: must be an object")
    elif kind == "ab-magnetic":
        if c.block(doc, "document", {"kind": 1, "solenoid": 1, "contour": 1}, {"numeric": 1, "output": 1}):
            sol = doc["solenoid"]
            if isinstance(sol, dict):
                if c.block(sol, "solenoid", {"radius": 1, "flux": 1}, {"center": 1, "profile": 1}):
                    c.number(sol, "radius", "solenoid", positive=True)
                    c.number(sol, "flux", "solenoid")
                    if sol.get("profile", "uniform") not in ("uniform", "bump"):
                        c.fail(f"solenoid: unknown profile {sol.get('profile')!r}")
            else:
                c.fail("solenoid: must be an object")
            _check_contour(c, doc["contour"])
        _check_numeric(c, doc.get("numeric"), "numeric", _NUMERIC_FIELDS[kind])
    elif kind == "sweep":
        if c.block(doc, "document", {"kind": 1, "parameter": 1, "values": 1, "experiment": 1}, {"output": 1}):
            if not isinstance(doc["parameter"], str):
                c.fail("sweep: 'parameter' must be a dotted key string")
            if not isinstance(doc["values"], list) or not doc["values"]:
                c.fail("sweep: 'values' must be a nonempty array")
            sub = doc["experiment"]
            if not isinstance(sub, dict):
                c.fail("sweep: 'experiment' must be a config object")
            elif sub.get("kind") == "sweep":
                c.fail("sweep: nested sweeps are not supported")
            else:
                for value in doc["values"] if isinstance(doc["values"], list) else []:
                    trial = _substitute(sub, doc["parameter"], value)
                    sub_checker = _Checker()
                    _validate(sub_checker, trial)
                    for msg in sub_checker.errors:
                        c.fail(f"sweep[{value!r}]: {msg}")
                    break  # shape errors repeat identically; report once


def _substitute(doc: dict, dotted: str, value):
    out = json.loads(json.dumps(doc))
    node = out
    keys = dotted.split(".")
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ConfigError([f"sweep parameter path {dotted!r} not found"])
        node = node[key]
    if not isinstance(node, dict):
        raise ConfigError([f"sweep parameter path {dotted!r} not found"])
    node[keys[-1]] = value
    return out


def _validate(c: _Checker, doc):
    if not isinstance(doc, dict):
        c.fail("document: top level must be an object")
        return
    kind = doc.get("kind")
    if kind not in KINDS:
        c.fail(f"document: 'kind' must be one of {KINDS}, got {kind!r}")
        return
    if "output" in doc and not isinstance(doc["output"], str):
        c.fail("document: 'output' must be a string path")
    _check_kind(c, kind, doc)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment document; raises ConfigError
    carrying every validation problem found."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"document is not valid JSON: {exc}"]) from exc
    checker = _Checker()
    _validate(checker, doc)
    if checker.errors:
        raise ConfigError(checker.errors)
    return ExperimentConfig(doc["kind"], doc, doc.get("output"))


def sweep_trials(config: ExperimentConfig):
    """Expand a sweep config into its per-value sub-configs, in order."""
    for value in config.data["values"]:
        trial = _substitute(config.data["experiment"], config.data["parameter"], value)
        yield value, ExperimentConfig(trial["kind"], trial, None)


# --- builders: validated blocks to domain objects -------------------------


def _matrix_from_pairs(block, what: str) -> np.ndarray:
    arr = np.asarray(block, dtype=float)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise ValueError(
            f"{what} must be an n x n array of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def build_model(block: dict) -> models.HermitianModel:
    mtype = block["type"]
    if mtype == "spin-half":
        return models.spin_half_model()
    if mtype == "degenerate-4x4":
        return models.degenerate_example_model()
    gens = [_matrix_from_pairs(g, f"generators[{i}]") for i, g in enumerate(block["generators"])]
    offset = None
    if block.get("offset") is not None:
        offset = _matrix_from_pairs(block["offset"], "offset")
    return models.HermitianModel(generators=tuple(gens), offset=offset)


def build_band(block: dict) -> models.BandSelector:
    return models.BandSelector(
        index=block.get("index"),
        energy=block.get("energy"),
        multiplicity=block.get("multiplicity", 1),
    )


def build_path(block: dict):
    from . import paths

    if block["type"] == "circle":
        return paths.circle_loop(block["radius"], block["theta"], block["n"])
    pts = np.asarray(block["points"], dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
    times = block.get("times")
    ts = np.arange(pts.shape[0], dtype=float) if times is None else np.asarray(times, dtype=float)
    return paths.ParameterPath(pts, ts, closed=bool(block.get("closed", True)))


def build_contour(block: dict):
    from . import ab_effect

    if block["type"] == "circle":
        return ab_effect.circle_contour(
            block.get("center", [0.0, 0.0]),
            block["radius"],
            n=block.get("n", 256),
            turns=block.get("turns", 1),
        )
    return ab_effect.PlanarContour(np.asarray(block["vertices"], dtype=float))


def build_solenoid(block: dict):
    from . import ab_effect

    return ab_effect.SolenoidProfile(
        radius=block["radius"],
        flux=block["flux"],
        center=np.asarray(block.get("center", [0.0, 0.0]), dtype=float),
        profile=block.get("profile", "uniform"),
    )


def build_pulses(block: dict):
    from . import ab_effect

    upper = np.asarray(block["upper"], dtype=float)
    lower = np.asarray(block["lower"], dtype=float)
    times = np.linspace(0.0, block["t0"], upper.shape[0])
    return ab_effect.PulsePair(times, upper, lower, charge=block.get("charge", 1.0))
