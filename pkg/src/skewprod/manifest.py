"""Manifest loading and validation.

A manifest is a JSON document describing the ambient product structure, the
immersion, how to sample it, an optional warped-product split and which
checks to run. Structural problems are reported as ``SchemaError`` with a
JSON pointer; expression problems keep the index of the offending component.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import jsonschema

from .config import DEFAULT, Tolerances
from .errors import InputError, LexError, ParseError, SchemaError
from .geometry import Immersion
from .warped import WarpedSpec

CHECKS = ("classify", "identities", "warped", "inequality", "integrability")

_NAMES = {"type": "array", "items": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"},
          "minItems": 1, "uniqueItems": True}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["ambient", "immersion"],
    "properties": {
        "name": {"type": "string"},
        "ambient": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n", "signs"],
            "properties": {
                "n": {"type": "integer", "minimum": 2},
                "signs": {"type": "array", "items": {"enum": [1, -1]}, "minItems": 2},
            },
        },
        "immersion": {
            "type": "object",
            "additionalProperties": False,
            "required": ["params", "components", "domain"],
            "properties": {
                "params": _NAMES,
                "components": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "domain": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                },
            },
        },
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "grid": {"oneOf": [{"type": "integer", "minimum": 0},
                                   {"type": "array", "items": {"type": "integer", "minimum": 0}}]},
                "random": {"type": "integer", "minimum": 0},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "warped": {
            "type": "object",
            "additionalProperties": False,
            "required": ["base_params", "fiber_params", "warp"],
            "properties": {"base_params": _NAMES, "fiber_params": _NAMES, "warp": {"type": "string"}},
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {f.name: {"type": "number", "exclusiveMinimum": 0} for f in fields(Tolerances)},
        },
        "checks": {"type": "array", "items": {"enum": list(CHECKS)}, "uniqueItems": True},
    },
}


@dataclass(frozen=True)
class Sampling:
    grid: int | tuple[int, ...] = 3
    random: int = 16
    seed: int = 0


@dataclass(frozen=True)
class Manifest:
    immersion: Immersion
    sampling: Sampling
    warped: WarpedSpec | None
    tolerances: Tolerances
    checks: tuple[str, ...]
    raw: dict

    @property
    def name(self) -> str:
        return self.immersion.name


def _pointer(parts) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in parts) if parts else ""


def _schema_error(err: jsonschema.ValidationError) -> SchemaError:
    path = list(err.absolute_path)
    if err.validator == "required":
        missing = next((k for k in err.validator_value if k not in err.instance), None)
        if missing is not None:
            return SchemaError(f"missing required key {missing!r}", _pointer(path + [missing]))
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        if extra:
            return SchemaError(f"unknown key {extra[0]!r}", _pointer(path + [extra[0]]))
    return SchemaError(err.message, _pointer(path) or "/")


def validate(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if err is not None:
        raise _schema_error(err)


def from_dict(doc, name: str = "manifest") -> Manifest:
    validate(doc)
    amb, im = doc["ambient"], doc["immersion"]
    signs = amb["signs"]
    if len(signs) != amb["n"]:
        raise SchemaError(f"{len(signs)} signs for n = {amb['n']}", "/ambient/signs")
    if 1 not in signs or -1 not in signs:
        raise SchemaError("signs must contain both +1 and -1", "/ambient/signs")
    if len(im["components"]) != amb["n"]:
        raise SchemaError(f"{len(im['components'])} components for n = {amb['n']}", "/immersion/components")
    if len(im["domain"]) != len(im["params"]):
        raise SchemaError("one domain interval per parameter is required", "/immersion/domain")
    for i, (lo, hi) in enumerate(im["domain"]):
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise SchemaError(f"invalid interval [{lo}, {hi}]", f"/immersion/domain/{i}")
    if len(im["params"]) >= amb["n"]:
        raise SchemaError("need fewer parameters than ambient dimensions", "/immersion/params")
    imm = Immersion.from_strings(im["params"], im["components"], im["domain"], signs, doc.get("name", name))

    s = doc.get("sampling", {})
    grid = s.get("grid", 3)
    if isinstance(grid, list):
        if len(grid) != imm.d:
            raise SchemaError("grid needs one count per parameter", "/sampling/grid")
        grid = tuple(grid)
    sampling = Sampling(grid, s.get("random", 16), s.get("seed", 0))
    n_grid = grid ** imm.d if isinstance(grid, int) else math.prod(grid)
    if n_grid + sampling.random < 2:
        raise SchemaError("sampling must produce at least two points", "/sampling")

    spec = None
    if "warped" in doc:
        w = doc["warped"]
        try:
            spec = WarpedSpec.from_strings(imm, w["base_params"], w["fiber_params"], w["warp"])
        except (LexError, ParseError) as exc:
            raise SchemaError(f"warping function: {exc}", "/warped/warp") from exc
        except InputError as exc:
            raise SchemaError(str(exc), "/warped") from exc

    tol = DEFAULT.updated(doc.get("tolerances", {}))
    checks = tuple(doc.get("checks", [c for c in CHECKS if spec is not None or c not in ("warped", "inequality")]))
    for c in ("warped", "inequality"):
        if c in checks and spec is None:
            raise SchemaError(f"check {c!r} needs a 'warped' section", "/warped")
    return Manifest(imm, sampling, spec, tol, checks, doc)


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read manifest {str(path)!r}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", "") from exc
    return from_dict(doc, path.stem)
