"""JSON scenario files: schema, parsing and model construction."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, fields
from typing import Any

import jsonschema

from .core import Domain, VortexSystem, validate_system
from .errors import InvalidState, SchemaError, ValidationError
from .halfplane import DEFAULT_OMEGA0, HalfPlaneModel, Restricted3Model, Restricted3State
from .integrate import IntegratorSettings
from .membranes import MembraneModel, SphereProductState
from .planar import PlaneModel
from .quadrant import QuadrantModel
from .rings import RingModel, RingSystem

MODELS = ("plane", "halfplane", "quadrant", "rings", "membrane", "restricted3")

_pos = {"type": "number", "exclusiveMinimum": 0}
_num = {"type": "number"}
_point = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["model"],
    "properties": {
        "model": {"enum": list(MODELS)},
        "strengths": {"type": "array", "items": _num, "minItems": 1},
        "positions": {"type": "array", "items": _point, "minItems": 1},
        "tracers": {"type": "array", "items": {"type": "boolean"}},
        "normalization": {"enum": ["verbatim", "green"]},
        "rings": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["Z", "R", "gamma", "a"],
                "properties": {"Z": _num, "R": _pos, "gamma": _num, "a": _pos},
            },
        },
        "core": {"enum": ["volume", "fixed"]},
        "membrane": {
            "type": "object",
            "additionalProperties": False,
            "required": ["a", "b", "m", "l"],
            "properties": {
                "a": _pos, "b": _pos,
                "m": {"type": "integer", "minimum": 1},
                "l": {"type": "integer", "minimum": 1},
            },
        },
        "restricted3": {
            "type": "object",
            "additionalProperties": False,
            "required": ["x", "y"],
            "properties": {"x": _num, "y": _num, "epsilon": {"type": "number", "minimum": 0},
                           "omega0": _pos},
        },
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": _pos, "abs_tol": _pos, "max_step": _pos, "min_step": _pos,
                "t_end": {"type": "number", "minimum": 0}, "sample_dt": _pos,
            },
        },
        "events": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "close_approach": _pos, "boundary_distance": _pos, "collapse_radius": _pos,
                "escape_radius": _pos, "singular_radius": _pos,
            },
        },
        "poincare": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_periods": {"type": "integer", "minimum": 1},
                "epsilons": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "initial_points": {"type": "array", "items": _point, "minItems": 1},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["parameter", "values"],
            "properties": {
                "parameter": {"type": "string", "minLength": 1},
                "values": {"type": "array", "minItems": 1},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "string", "minLength": 1}
                           for k in ("trajectory", "drift", "events", "section")},
        },
    },
    "allOf": [
        {"if": {"properties": {"model": {"enum": ["plane", "halfplane", "quadrant"]}}},
         "then": {"required": ["strengths", "positions"]}},
        {"if": {"properties": {"model": {"const": "rings"}}}, "then": {"required": ["rings"]}},
        {"if": {"properties": {"model": {"const": "membrane"}}}, "then": {"required": ["membrane"]}},
        {"if": {"properties": {"model": {"const": "restricted3"}}}, "then": {"required": ["restricted3"]}},
    ],
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)

DEFAULT_OUTPUTS = {"trajectory": "trajectory.csv", "drift": "drift.json",
                   "events": "events.jsonl", "section": "section.csv"}


@dataclass
class ScenarioConfig:
    model: str
    strengths: list[float] | None = None
    positions: list[list[float]] | None = None
    tracers: list[bool] | None = None
    normalization: str | None = None
    rings: list[dict[str, float]] | None = None
    core: str | None = None
    membrane: dict[str, Any] | None = None
    restricted3: dict[str, float] | None = None
    integrator: dict[str, float] = field(default_factory=dict)
    events: dict[str, float] = field(default_factory=dict)
    poincare: dict[str, Any] | None = None
    sweep: dict[str, Any] | None = None
    outputs: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            out[f.name] = copy.deepcopy(v)
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ScenarioConfig":
        check_schema(data)
        return cls(**copy.deepcopy(data))

    def output_name(self, key: str) -> str:
        return self.outputs.get(key, DEFAULT_OUTPUTS[key])

    def with_parameter(self, dotted: str, value) -> "ScenarioConfig":
        """Copy with one field replaced; ``dotted`` is e.g. ``restricted3.epsilon``."""
        data = self.to_dict()
        node = data
        parts = dotted.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise SchemaError(f"{dotted}: {p} is not an object")
        node[parts[-1]] = value
        return parse_dict(data)


def _path(err) -> str:
    parts = [str(p) for p in err.absolute_path]
    return ".".join(parts) if parts else "<root>"


def check_schema(data) -> None:
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: (len(e.absolute_path), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise SchemaError(f"{_path(err)}: {err.message}")


def parse_dict(data) -> ScenarioConfig:
    cfg = ScenarioConfig.from_dict(data)
    validate_config(cfg)
    return cfg


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate a JSON scenario document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return parse_dict(data)


def serialize(cfg: ScenarioConfig) -> str:
    return cfg.to_json()


def validate_config(cfg: ScenarioConfig) -> None:
    """Semantic checks beyond the schema, by building the model."""
    if cfg.positions is not None and cfg.strengths is not None:
        if len(cfg.positions) != len(cfg.strengths):
            raise ValidationError(
                f"positions: {len(cfg.positions)} entries but {len(cfg.strengths)} strengths")
    if cfg.tracers is not None and cfg.strengths is not None and len(cfg.tracers) != len(cfg.strengths):
        raise ValidationError("tracers: one flag per vortex is required")
    model = build_model(cfg)
    build_settings(cfg)
    if cfg.model == "restricted3" and cfg.poincare:
        for i, (x, y) in enumerate(cfg.poincare.get("initial_points", [])):
            try:
                model.state.moved(x, y)
            except ValueError as e:
                raise ValidationError(f"poincare.initial_points.{i}: {e}") from e


def build_model(cfg: ScenarioConfig, **overrides):
    """The integrable model a config describes. Invalid states raise ValidationError."""
    field_name = {"rings": "rings", "membrane": "membrane", "restricted3": "restricted3"}.get(
        cfg.model, "positions")
    try:
        if cfg.model in ("plane", "halfplane", "quadrant"):
            domain = {"plane": Domain.PLANE, "halfplane": Domain.HALFPLANE,
                      "quadrant": Domain.QUADRANT}[cfg.model]
            s = VortexSystem(cfg.strengths, cfg.positions, domain, cfg.tracers)
            if cfg.model == "plane":
                return PlaneModel(s)
            if cfg.model == "halfplane":
                return HalfPlaneModel(s, cfg.normalization or "verbatim")
            validate_system(s)
            return QuadrantModel(float(s.strengths[0]), float(s.x[0]), float(s.y[0]))
        if cfg.model == "rings":
            rs = RingSystem.from_rings([(r["Z"], r["R"], r["gamma"], r["a"]) for r in cfg.rings],
                                       cfg.core or "volume")
            return RingModel(rs)
        if cfg.model == "membrane":
            m = cfg.membrane
            st = SphereProductState(m["a"], m["b"], m["m"], m["l"])
            return MembraneModel(st, cfg.events.get("collapse_radius"))
        r3 = cfg.restricted3
        st = Restricted3State(r3["x"], r3["y"], overrides.get("epsilon", r3.get("epsilon", 0.0)),
                              r3.get("omega0", DEFAULT_OMEGA0))
        return Restricted3Model(st, cfg.events.get("escape_radius", 10.0),
                                cfg.events.get("singular_radius", 1e-3))
    except ValidationError:
        raise
    except (InvalidState, ValueError) as e:
        raise ValidationError(f"{field_name}: {e}") from e


def build_settings(cfg: ScenarioConfig, t_end: float | None = None,
                   rel_tol: float | None = None) -> IntegratorSettings:
    kw = dict(cfg.integrator)
    for k in ("close_approach", "boundary_distance", "collapse_radius"):
        if k in cfg.events:
            kw[k] = cfg.events[k]
    if t_end is not None:
        kw["t_end"] = t_end
    if rel_tol is not None:
        kw["rel_tol"] = rel_tol
        kw["abs_tol"] = min(kw.get("abs_tol", rel_tol * 1e-2), rel_tol * 1e-2)
    try:
        return IntegratorSettings(**kw)
    except InvalidState as e:
        raise ValidationError(f"integrator: {e}") from e
