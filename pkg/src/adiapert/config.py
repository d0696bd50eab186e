"""Versioned JSON run configuration: schema, loading and object builders."""

from __future__ import annotations

import copy
import json
import math

import jsonschema
import numpy as np

from . import hampath as hp
from .errors import ConfigInvalid

SCHEMA_VERSION = 1
TWO_PI = 2.0 * math.pi

MODEL_TYPES = ("nmr_single", "nmr_two_qubit", "josephson", "tripod", "ion_two_bit")

_number = {"type": "number"}
_model = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": list(MODEL_TYPES)},
        "params": {"type": "object", "additionalProperties": _number},
    },
    "additionalProperties": False,
}
_schedule = {
    "type": "object",
    "properties": {
        "T": {"type": "number", "exclusiveMinimum": 0},
        "shape": {"enum": list(hp.SHAPES)},
    },
    "additionalProperties": False,
}
_level = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "adiapert run configuration",
    "type": "object",
    "required": ["schema"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "model": _model,
        "schedule": _schedule,
        "initial": {
            "type": "object",
            "properties": {
                "level": _level,
                "amplitudes": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["level", "re"],
                        "properties": {"level": _level, "re": _number, "im": _number},
                        "additionalProperties": False,
                    },
                    "minItems": 1,
                },
            },
            "additionalProperties": False,
        },
        "gate_kind": {"enum": ["berry", "wz"]},
        "points": {"type": "integer", "minimum": 2},
        "level": {"type": "integer", "minimum": 0},
        "sweep": {
            "type": "object",
            "required": ["param", "min", "max", "points"],
            "properties": {
                "param": {"type": "string"},
                "min": _number,
                "max": _number,
                "points": {"type": "integer", "minimum": 3},
                "log": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "gatearray": {
            "type": "object",
            "required": ["n_qubits", "rounds"],
            "properties": {
                "n_qubits": {"type": "integer", "minimum": 1, "maximum": 12},
                "rounds": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["model", "qubits"],
                            "properties": {
                                "model": _model,
                                "schedule": _schedule,
                                "qubits": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                                "kind": {"enum": ["berry", "wz"]},
                                "name": {"type": "string"},
                            },
                            "additionalProperties": False,
                        },
                    },
                },
                "input": {"enum": ["zero", "random", "ghz", "plus"]},
            },
            "additionalProperties": False,
        },
        "aqc": {
            "type": "object",
            "required": ["n"],
            "properties": {
                "n": {"type": "integer", "minimum": 1, "maximum": 8},
                "costs": {"type": "array", "items": _number},
                "instances": {"type": "integer", "minimum": 1},
                "T": {"type": "number", "exclusiveMinimum": 0},
                "ratio": {"type": "number", "exclusiveMinimum": 0},
                "shape": {"enum": list(hp.SHAPES)},
                "min_gap": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

_complex_list = {"type": "object", "required": ["re", "im"],
                 "properties": {"re": {"type": "array"}, "im": {"type": "array"}}}

SUMMARY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "adiapert run summary",
    "type": "object",
    "required": ["schema", "command", "hbar_units", "result"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "command": {"enum": ["evolve", "sweep", "berry", "holonomy", "gatearray", "aqc", "bound"]},
        "hbar_units": {"enum": ["angular", "hz"]},
        "seed": {"type": ["integer", "null"]},
        "tolerance": {"type": ["number", "null"]},
        "config": {"type": ["object", "null"]},
        "result": {"type": "object"},
    },
    "additionalProperties": False,
}


def _field_path(err: jsonschema.ValidationError) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def validate_config(cfg: dict) -> dict:
    """Validate ``cfg`` against :data:`CONFIG_SCHEMA`; raise :class:`ConfigInvalid` naming the field."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = _field_path(err)
        if err.validator == "required":
            missing = err.message.split("'")[1]
            where = f"{where}/{missing}" if where != "<root>" else missing
            raise ConfigInvalid(f"missing required field '{where.replace('/', '.')}'")
        raise ConfigInvalid(f"invalid field '{where.replace('/', '.')}': {err.message}")
    return cfg


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(cfg)


def validate_summary(summary: dict) -> None:
    jsonschema.validate(summary, SUMMARY_SCHEMA, cls=jsonschema.Draft202012Validator)


def require(cfg: dict, *keys):
    node = cfg
    for i, k in enumerate(keys):
        if not isinstance(node, dict) or k not in node:
            raise ConfigInvalid(f"missing required field '{'.'.join(keys[: i + 1])}'")
        node = node[k]
    return node


def with_value(cfg: dict, param: str, value: float) -> dict:
    """Copy of ``cfg`` with the schedule duration or a model parameter replaced."""
    out = copy.deepcopy(cfg)
    if param == "T":
        out.setdefault("schedule", {})["T"] = float(value)
    else:
        out.setdefault("model", {}).setdefault("params", {})[param] = float(value)
    return out


_PARAMS = {
    "nmr_single": (hp.NMRSingleParams, hp.nmr_single_path),
    "nmr_two_qubit": (hp.NMRTwoQubitParams, hp.nmr_two_qubit_path),
    "josephson": (hp.JosephsonParams, hp.josephson_charge_path),
    "tripod": (hp.TripodParams, hp.tripod_ion_path),
    "ion_two_bit": (hp.IonTwoBitParams, hp.ion_two_bit_path),
}

# parameters carrying an energy (scaled by 2 pi when frequencies are given in Hz)
_ENERGY_KEYS = {"omega0", "omega1", "omega", "gap", "omega_a0", "J", "detuning_b", "e_j", "e_c",
                "omega_1", "omega_a", "delta"}


def build_path(model: dict, schedule: dict, T: float | None = None, units: str = "angular") -> hp.HamiltonianPath:
    """Path for a ``model`` / ``schedule`` config pair.

    With ``units="hz"`` every energy-like parameter is read as a cyclic
    frequency and converted to angular frequency.
    """
    kind = model["type"]
    params = dict(model.get("params", {}))
    if units == "hz":
        params = {k: (v * TWO_PI if k in _ENERGY_KEYS else v) for k, v in params.items()}
    duration = T if T is not None else schedule.get("T")
    if duration is None:
        raise ConfigInvalid("missing required field 'schedule.T'")
    sched = hp.Schedule(float(duration), schedule.get("shape", "linear"))
    cls, factory = _PARAMS[kind]
    try:
        if kind == "nmr_single" and "theta" in params:
            gap = params.pop("gap", 1.0)
            p = cls.from_cone(gap, params.pop("theta"), **params)
        elif kind == "nmr_single" and "gap" in params:
            raise TypeError("'gap' needs 'theta'")
        else:
            p = cls(**params)
    except TypeError as exc:
        raise ConfigInvalid(f"invalid field 'model.params' for {kind}: {exc}") from exc
    return factory(p, sched)


def initial_amplitudes(cfg: dict, frame):
    from .perturb import AmplitudeVector

    init = cfg.get("initial", {"level": [0, 0]})
    try:
        if "amplitudes" in init:
            amps = {tuple(a["level"]): complex(a["re"], a.get("im", 0.0)) for a in init["amplitudes"]}
            return AmplitudeVector.from_levels(frame, amps)
        return AmplitudeVector.level(frame, *init.get("level", [0, 0]))
    except IndexError as exc:
        raise ConfigInvalid(f"invalid field 'initial': level outside the block structure {frame.pattern}") from exc
    except ValueError as exc:
        raise ConfigInvalid(f"invalid field 'initial': {exc}") from exc


def register_state(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    d = 2 ** n
    if kind == "zero":
        psi = np.zeros(d, dtype=complex)
        psi[0] = 1.0
        return psi
    if kind == "plus":
        return np.full(d, 1 / math.sqrt(d), dtype=complex)
    if kind == "ghz":
        psi = np.zeros(d, dtype=complex)
        psi[0] = psi[-1] = 1 / math.sqrt(2)
        return psi
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)
