"""Problem description files (TOML) and their schema."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .evidence import DSStructure, EvidenceError, dempster_combine, mix
from .expr import ExprAst, ExprError, parse
from .propagate import METHODS, PropagationConfig


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


_number = {"type": "number"}
_mass = {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"type": "string", "pattern": r"^\s*\d+(\.\d*)?\s*(/\s*\d+\s*)?$"}]}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["function", "variables"],
    "additionalProperties": False,
    "properties": {
        "function": {"type": "string", "minLength": 1},
        "variables": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "sources"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "pattern": r"^[A-Za-z_][A-Za-z_0-9]*$"},
                    "aggregation": {"enum": ["mixing", "dempster"]},
                    "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
                    "sources": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "object",
                                "required": ["interval", "mass"],
                                "additionalProperties": False,
                                "properties": {
                                    "interval": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
                                    "mass": _mass,
                                },
                            },
                        },
                    },
                },
            },
        },
        "propagation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "order": {"type": "integer", "minimum": 1},
                "quad_points": {"type": "integer", "minimum": 2},
                "subdivisions": {"type": "integer", "minimum": 1},
                "methods": {"type": "array", "minItems": 1, "items": {"enum": list(METHODS)}},
                "oracle_grid": {"type": "integer", "minimum": 2},
                "oracle_refine": {"type": "integer", "minimum": 0},
            },
        },
        "queries": {
            "type": "array",
            "items": {
                "oneOf": [
                    {
                        "type": "object",
                        "required": ["exceedance"],
                        "additionalProperties": False,
                        "properties": {"exceedance": _number},
                    },
                    {
                        "type": "object",
                        "required": ["curve"],
                        "additionalProperties": False,
                        "properties": {
                            "curve": {
                                "type": "object",
                                "required": ["from", "to", "step"],
                                "additionalProperties": False,
                                "properties": {
                                    "from": _number,
                                    "to": _number,
                                    "step": {"type": "number", "exclusiveMinimum": 0},
                                },
                            }
                        },
                    },
                ]
            },
        },
    },
}


@dataclass(frozen=True)
class Curve:
    start: float
    stop: float
    step: float


@dataclass
class ProblemConfig:
    function: ExprAst
    inputs: dict[str, DSStructure]
    propagation: PropagationConfig
    methods: list[str]
    thresholds: list[float] = field(default_factory=list)
    curves: list[Curve] = field(default_factory=list)


def _path(error: jsonschema.ValidationError) -> str:
    parts = []
    for p in error.absolute_path:
        parts.append(f"[{p}]" if isinstance(p, int) else (f".{p}" if parts else str(p)))
    return "".join(parts) or "<root>"


@functools.lru_cache(maxsize=1)
def _validator():
    return jsonschema.Draft202012Validator(SCHEMA)


def validate(raw: dict) -> None:
    errors = sorted(_validator().iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise ConfigError(_path(err), err.message)


def _aggregate(entry: dict, where: str) -> DSStructure:
    sources = []
    for s, source in enumerate(entry["sources"]):
        try:
            sources.append(DSStructure((tuple(e["interval"]), e["mass"]) for e in source))
        except (EvidenceError, ValueError) as exc:
            raise ConfigError(f"{where}.sources[{s}]", str(exc)) from exc
    rule = entry.get("aggregation", "mixing")
    if rule == "dempster":
        if "weights" in entry:
            raise ConfigError(f"{where}.weights", "weights only apply to the mixing rule")
        out = sources[0]
        for s, other in enumerate(sources[1:], start=1):
            try:
                out = dempster_combine(out, other)
            except EvidenceError as exc:
                raise ConfigError(f"{where}.sources[{s}]", str(exc)) from exc
        return out
    weights = entry.get("weights")
    try:
        return mix(sources, weights)
    except EvidenceError as exc:
        raise ConfigError(f"{where}.weights", str(exc)) from exc


def from_dict(raw: dict) -> ProblemConfig:
    validate(raw)
    names = [v["name"] for v in raw["variables"]]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ConfigError("variables", f"duplicate variable name(s) {dupes}")
    try:
        function = parse(raw["function"], names)
    except ExprError as exc:
        raise ConfigError("function", str(exc)) from exc
    inputs = {v["name"]: _aggregate(v, f"variables[{i}]") for i, v in enumerate(raw["variables"])}
    prop = dict(raw.get("propagation", {}))
    methods = prop.pop("methods", ["chaos-bernstein"])
    try:
        cfg = PropagationConfig(**prop)
    except ValueError as exc:
        raise ConfigError("propagation", str(exc)) from exc
    thresholds, curves = [], []
    for q, query in enumerate(raw.get("queries", [])):
        if "exceedance" in query:
            thresholds.append(float(query["exceedance"]))
        else:
            c = query["curve"]
            if c["to"] < c["from"]:
                raise ConfigError(f"queries[{q}].curve", "'to' is below 'from'")
            curves.append(Curve(float(c["from"]), float(c["to"]), float(c["step"])))
    return ProblemConfig(function, inputs, cfg, list(dict.fromkeys(methods)), thresholds, curves)


def load(path: str | Path) -> ProblemConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror or exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"invalid TOML: {exc}") from exc
    return from_dict(raw)
