"""Finite-depth checks and constructions for rational maps of the sphere."""

import json

import numpy as np

from ._core import (
    SCHEMA,
    IoError,
    NumericError,
    PreconditionError,
    RationalMap,
    chordal_distance,
    command_names,
    modulus_round,
    qc_modulus_bounds,
)
from . import _core

__all__ = [
    "SCHEMA",
    "IoError",
    "NumericError",
    "PreconditionError",
    "RationalMap",
    "chordal_distance",
    "command_names",
    "modulus_round",
    "qc_modulus_bounds",
    "quadratic_map",
    "render",
    "run",
]


def quadratic_map(c):
    """Map document for z^2 + c."""
    c = complex(c)
    return {"quadratic_c": [c.real, c.imag]}


def _map_json(map):
    if map is None:
        return ""
    if isinstance(map, RationalMap):
        return map.to_json()
    return json.dumps(map)


def run(command, map=None, *, seed=0, budget=1_000_000, workers=1, **params):
    """Result of a subcommand as a dict. Keyword names follow the JSON
    parameter keys (delta, delta_prime, depth, ...); input documents such as
    nice sets or dynamics are passed as dicts."""
    out = _core.run_json(command, _map_json(map), json.dumps(params), seed, budget, workers)
    return json.loads(out)


def render(map, *, workers=1, **params):
    """Julia-set mask as a (height, width) uint8 array."""
    pgm = _core.render_pgm(_map_json(map), json.dumps(params), workers)
    header, rest = pgm.split(b"\n", 1)
    dims, rest = rest.split(b"\n", 1)
    _, data = rest.split(b"\n", 1)
    width, height = (int(v) for v in dims.split())
    return np.frombuffer(data, dtype=np.uint8).reshape(height, width)
