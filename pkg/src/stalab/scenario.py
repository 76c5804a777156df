"""Scenario files: dataclass configs, JSON schema and preset lookup."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import jsonschema
import numpy as np

from . import algebra as ga
from .connections import ConnectionField, TetradField
from .dirac_hestenes import GaugeModel, SpinorField
from .em import coulomb_field, lienard_wiechert_uniform, pullback_field
from .boosts import boost_matrix
from .fields import EventGrid, Field
from .rotor_gauge import RotorField, active_rotate_field, rotor_presets


class ScenarioError(ValueError):
    pass


_NUM = {"type": "number"}
_VEC4 = {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4}

SCHEMA: dict = {
    "type": "object",
    "required": ["name", "checks"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 3},
                "h": {"type": "number", "exclusiveMinimum": 0},
                "center": _VEC4,
                "events": {"type": "integer", "minimum": 1},
            },
        },
        "physics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "charge": _NUM,
                "velocity": {"type": "number", "exclusiveMinimum": -1, "exclusiveMaximum": 1},
                "mass": {"type": "number", "minimum": 0},
                "tetrad": {"type": "string"},
                "frame_rate": _NUM,
                "connection": {
                    "oneOf": [
                        {"type": "string"},
                        {"type": "array", "minItems": 4, "maxItems": 4,
                         "items": {"type": "array", "minItems": 4, "maxItems": 4,
                                   "items": {"type": "array", "minItems": 4, "maxItems": 4, "items": _NUM}}},
                    ]
                },
                "torsion_strength": _NUM,
                "rotor": {"type": "string"},
                "rotor_field": {
                    "type": "object",
                    "required": ["plane"],
                    "additionalProperties": False,
                    "properties": {
                        "plane": {"type": "array", "items": {"type": "integer", "minimum": 0, "maximum": 3},
                                  "minItems": 2, "maxItems": 2},
                        "phase0": _NUM,
                        "gradient": _VEC4,
                    },
                },
                "spinor": {
                    "oneOf": [
                        {"type": "string"},
                        {"type": "object", "required": ["constant"], "additionalProperties": False,
                         "properties": {
                             "constant": {"type": "array", "items": _NUM, "minItems": 16, "maxItems": 16},
                             "gradient": {"type": "array", "minItems": 4, "maxItems": 4,
                                          "items": {"type": "array", "items": _NUM,
                                                    "minItems": 16, "maxItems": 16}}}},
                    ]
                },
            },
        },
        "checks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "tolerances": {"type": "object",
                                   "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
                },
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"},
                "dumps": {"type": "array", "items": {"type": "string"}},
            },
        },
    },
}


@dataclass(frozen=True)
class GridSpec:
    n: int = 17
    h: float = 0.1
    center: tuple = (0.0, 2.0, 1.0, 0.5)
    events: int = 100

    def grid(self) -> EventGrid:
        return EventGrid.centered(self.center, self.h, self.n)


@dataclass(frozen=True)
class PhysicsSpec:
    charge: float = 1.0
    velocity: float = 0.6
    mass: float = 1.0
    tetrad: str = "cartesian"
    frame_rate: float = 0.5
    connection: Any = "zero"
    torsion_strength: float = 0.4
    rotor: str = "local-rotation"
    rotor_field: Optional[dict] = None
    spinor: Any = "generic-even"


@dataclass(frozen=True)
class CheckSpec:
    name: str
    tolerances: dict = field(default_factory=dict)


@dataclass(frozen=True)
class OutputSpec:
    dir: Optional[str] = None
    dumps: tuple = ()


@dataclass(frozen=True)
class Scenario:
    name: str
    checks: tuple
    seed: int = 0
    grid: GridSpec = GridSpec()
    physics: PhysicsSpec = PhysicsSpec()
    output: OutputSpec = OutputSpec()

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, grid_n: Optional[int] = None, h: Optional[float] = None,
                       out: Optional[str] = None) -> "Scenario":
        g = self.grid
        if grid_n is not None:
            g = replace(g, n=grid_n)
        if h is not None:
            g = replace(g, h=h)
        o = self.output if out is None else replace(self.output, dir=out)
        return replace(self, grid=g, output=o)


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def parse_scenario(data: dict) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        msg = "; ".join(f"{_pointer(e.absolute_path)}: {e.message}" for e in errors)
        raise ScenarioError(f"invalid scenario: {msg}")
    grid = GridSpec(**{k: tuple(v) if k == "center" else v for k, v in data.get("grid", {}).items()})
    physics = PhysicsSpec(**data.get("physics", {}))
    out = data.get("output", {})
    output = OutputSpec(out.get("dir"), tuple(out.get("dumps", ())))
    checks = tuple(CheckSpec(c["name"], dict(c.get("tolerances", {}))) for c in data["checks"])
    sc = Scenario(data["name"], checks, data.get("seed", 0), grid, physics, output)
    build_presets(sc)
    return sc


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(data)


def shipped_scenarios() -> dict[str, Path]:
    root = Path(__file__).parent / "scenarios"
    return {p.name: p for p in sorted(root.glob("*.json"))}


# ---------------------------------------------------------------- presets


def _lookup(kind: str, table: dict, key: str):
    if key not in table:
        raise ScenarioError(f"unknown {kind} preset {key!r}; available: {', '.join(sorted(table))}")
    return table[key]


@dataclass(frozen=True)
class Presets:
    tetrad: TetradField
    connection: ConnectionField
    rotor: RotorField
    spinor: SpinorField
    model: GaugeModel


def build_presets(sc: Scenario) -> Presets:
    p = sc.physics
    tetrads = {"cartesian": TetradField.cartesian, "rotating": lambda: TetradField.rotating(p.frame_rate)}
    tetrad = _lookup("tetrad", tetrads, p.tetrad)()
    if isinstance(p.connection, str):
        conns = {
            "zero": ConnectionField.zero,
            "levi-civita": lambda: ConnectionField.rotating_levi_civita(p.frame_rate)
            if p.tetrad == "rotating" else ConnectionField.zero(),
            "torsional": lambda: ConnectionField.torsional(p.torsion_strength),
        }
        connection = _lookup("connection", conns, p.connection)()
    else:
        connection = ConnectionField.from_coefficients(np.asarray(p.connection, dtype=float))
    if p.rotor_field is not None:
        rf = p.rotor_field
        rotor = RotorField.planar(tuple(rf["plane"]), rf.get("phase0", 0.0),
                                  rf.get("gradient", (0, 0, 0, 0)), name="custom")
    else:
        rotor = _lookup("rotor", rotor_presets(), p.rotor)
    spinors = {
        "rest-plane-wave": lambda: SpinorField.rest_plane_wave(p.mass),
        "boosted-plane-wave": lambda: SpinorField.boosted_plane_wave(p.mass, p.velocity),
        "generic-even": SpinorField.generic_even,
    }
    if isinstance(p.spinor, dict):
        try:
            spinor = SpinorField.linear(p.spinor["constant"], p.spinor.get("gradient", np.zeros((4, 16))),
                                        "custom")
        except ga.ContractViolation as exc:
            raise ScenarioError(f"/physics/spinor: {exc}") from exc
    else:
        spinor = _lookup("spinor", spinors, p.spinor)()
    return Presets(tetrad, connection, rotor, spinor, GaugeModel(tetrad, connection))


def dump_fields(sc: Scenario) -> dict[str, Field]:
    q, v = sc.physics.charge, sc.physics.velocity
    pre = build_presets(sc)
    coulomb = coulomb_field(q)
    L, _ = boost_matrix(v)
    return {
        "coulomb": coulomb,
        "boosted-coulomb": pullback_field(L, coulomb),
        "lienard-wiechert": lienard_wiechert_uniform(q, (-v, 0.0, 0.0)),
        "rotated-coulomb": active_rotate_field(pre.rotor, coulomb),
        "spinor": pre.spinor,
    }


