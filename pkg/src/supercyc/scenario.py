"""JSON scenario files: schema, validation and defaults."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema

from .domains import INFINITY, DomainError, DomainSpec, Kind, build_grid
from .expr import Expression, ExpressionError, parse

__all__ = ["SCHEMA", "DEFAULT_HORIZONS", "ScenarioError", "Scenario", "load_scenario",
           "scenario_from_dict", "parse_point"]

DEFAULT_HORIZONS = {"orbitN": 256, "quotientN": 512, "witnessN": 1024}
DEFAULT_TOLERANCES = {"membership": 1e-9, "fixedPoint": 1e-10, "quotientCauchy": 1e-9,
                      "zeroWeight": 1e-12}

_point = {"oneOf": [{"type": "number"}, {"type": "string"},
                    {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}

_seq = {
    "type": "object",
    "properties": {
        "lo": {"type": "integer"},
        "re": {"type": "array", "items": {"type": "number"}},
        "im": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["lo", "re"],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "supercyc scenario",
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "domain": {
            "oneOf": [
                {"type": "string", "enum": [k.value for k in Kind]},
                {
                    "type": "object",
                    "properties": {
                        "kind": {"type": "string", "enum": [k.value for k in Kind]},
                        "radius": {"type": "number"},
                        "resolution": {"type": "integer"},
                        "rings": {"type": "integer"},
                        "cutoff": {"type": "number"},
                        "outer": {"type": "number"},
                        "lo": {"type": "integer"},
                        "hi": {"type": "integer"},
                        "infinity": {"type": "boolean"},
                        "tolerance": {"type": "number"},
                    },
                    "required": ["kind"],
                    "additionalProperties": False,
                },
            ]
        },
        "symbol": {"type": "string", "minLength": 1},
        "weight": {"type": "string", "minLength": 1},
        "testFunctions": {"type": "array", "items": {"type": "string", "minLength": 1}},
        "pairs": {"type": "array", "items": {"type": "array", "items": _point,
                                             "minItems": 2, "maxItems": 2}},
        "assertions": {
            "type": "object",
            "properties": {
                "analytic": {"type": "boolean"},
                "noWanderingInterval": {"type": "boolean"},
                "nowhereVanishingMember": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "horizons": {
            "type": "object",
            "properties": {k: {"type": "integer", "minimum": 1} for k in DEFAULT_HORIZONS},
            "additionalProperties": False,
        },
        "tolerances": {
            "type": "object",
            "properties": {k: {"type": "number", "exclusiveMinimum": 0}
                           for k in DEFAULT_TOLERANCES},
            "additionalProperties": False,
        },
        "shift": {
            "type": "object",
            "properties": {
                "kind": {"type": "string", "enum": ["bilateral", "unilateral"]},
                "weight": {"type": "string"},
                "vector": _seq,
                "targets": {"type": "array", "items": _seq},
                "schedule": {"type": "array", "items": {"type": "number"}},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "required": ["domain", "symbol"],
    "additionalProperties": False,
}


class ScenarioError(ValueError):
    """Invalid scenario; ``path`` names the offending field."""

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        where = f" at {path}" if path else ""
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{message}{where}")


@dataclass
class Scenario:
    name: str
    domain: DomainSpec
    symbol: Expression
    weight: Expression
    test_functions: list
    pairs: list
    assertions: dict
    horizons: dict
    tolerances: dict
    shift: Optional[dict] = None
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return copy.deepcopy(self.raw)

    def refined(self, factor: int) -> "Scenario":
        s = copy.copy(self)
        s.domain = self.domain.refined(factor)
        return s


def parse_point(p):
    """Number, [re, im], "inf", or a constant expression such as "0.5+0.5*i"."""
    if isinstance(p, bool):
        raise ValueError("boolean is not a point")
    if isinstance(p, (int, float)):
        return complex(p)
    if isinstance(p, (list, tuple)):
        return complex(float(p[0]), float(p[1]))
    if isinstance(p, complex):
        return p
    s = str(p).strip()
    if s.lower() in ("inf", "infinity", "oo"):
        return INFINITY
    e = parse(s)
    if "z" in e.unparse():
        raise ValueError(f"point {s!r} must not depend on z")
    return e(0j)


def _line_of(text: Optional[str], needle: str) -> Optional[int]:
    if not text:
        return None
    enc = json.dumps(needle)
    k = text.find(enc)
    return text.count("\n", 0, k) + 1 if k >= 0 else None


def _expr(data: dict, key: str, text: Optional[str], path: str) -> Expression:
    src = data[key]
    try:
        return parse(src)
    except ExpressionError as exc:
        raise ScenarioError(f"bad expression {src!r}: {exc}", path, _line_of(text, src)) from None


def _domain(spec) -> DomainSpec:
    if isinstance(spec, str):
        spec = {"kind": spec}
    params = dict(spec)
    kind = params.pop("kind")
    tol = params.pop("tolerance", None)
    try:
        if tol is None:
            return build_grid(kind, **params)
        return build_grid(kind, tolerance=tol, **params)
    except DomainError as exc:
        raise ScenarioError(str(exc), "domain") from None


def scenario_from_dict(data: dict, text: Optional[str] = None) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: [str(x) for x in e.absolute_path])
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path)
        if err.validator == "required":
            missing = [k for k in err.validator_value if k not in err.instance]
            path = "/".join(filter(None, [path, missing[0] if missing else ""]))
            raise ScenarioError(f"missing required field {missing[0]!r}", path)
        raise ScenarioError(err.message, path or "(root)")
    domain = _domain(data["domain"])
    if "tolerances" in data and "membership" in data["tolerances"]:
        spec = data["domain"] if isinstance(data["domain"], dict) else {"kind": data["domain"]}
        domain = _domain({**spec, "tolerance": data["tolerances"]["membership"]})
    symbol = _expr(data, "symbol", text, "symbol")
    weight = _expr(data, "weight", text, "weight") if "weight" in data else parse("1")
    tests = []
    for i, src in enumerate(data.get("testFunctions", ["1"])):
        tests.append(_expr({"f": src}, "f", text, f"testFunctions/{i}"))
    pairs = []
    for i, pr in enumerate(data.get("pairs", [])):
        try:
            pairs.append((parse_point(pr[0]), parse_point(pr[1])))
        except (ValueError, ExpressionError) as exc:
            raise ScenarioError(f"bad point: {exc}", f"pairs/{i}") from None
    assertions = {"analytic": False, "noWanderingInterval": False,
                  # constants live in C(X) over compact X; c0-type spaces have none
                  "nowhereVanishingMember": domain.is_compact}
    assertions.update(data.get("assertions", {}))
    horizons = {**DEFAULT_HORIZONS, **data.get("horizons", {})}
    tolerances = {**DEFAULT_TOLERANCES, **data.get("tolerances", {})}
    shift = data.get("shift")
    if shift and "weight" in shift:
        _expr(shift, "weight", text, "shift/weight")
    return Scenario(data.get("name", "scenario"), domain, symbol, weight, tests, pairs,
                    assertions, horizons, tolerances, shift, copy.deepcopy(data))


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", str(p)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg}", str(p), exc.lineno) from None
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object", "(root)")
    try:
        return scenario_from_dict(data, text)
    except ScenarioError as exc:
        raise ScenarioError(f"{p.name}: {exc.message}", exc.path, exc.line) from None
