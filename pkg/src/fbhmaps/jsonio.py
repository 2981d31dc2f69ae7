"""JSON encoding shared by the CLI: complex numbers are ``[re, im]`` pairs."""

import json

import jsonschema
import numpy as np

from .domain import DomainParams, DomainPoint
from .errors import SchemaError
from .fbhaut import FbhAut

COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
VECTOR = {"type": "array", "items": COMPLEX}
MATRIX = {"type": "array", "items": VECTOR, "minItems": 1}
PARAMS = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "mu": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["n"],
}
POINT = {
    "type": "object",
    "properties": {"z": VECTOR, "w": VECTOR},
    "required": ["z", "w"],
}
AUT = {
    "type": "object",
    "properties": {"U": MATRIX, "W": MATRIX, "v": VECTOR},
    "required": ["U", "W", "v"],
}


def validate(obj, schema, what):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        path = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise SchemaError(f"{what}{path}: {exc.message}") from None


def enc_complex(c):
    c = complex(c)
    return [c.real, c.imag]


def dec_complex(pair):
    return complex(pair[0], pair[1])


def enc_vector(v):
    return [enc_complex(c) for c in np.asarray(v).ravel()]


def dec_vector(items):
    return np.array([dec_complex(p) for p in items], dtype=complex).reshape(len(items))


def enc_matrix(M):
    return [enc_vector(row) for row in np.atleast_2d(M)]


def dec_matrix(rows):
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SchemaError("matrix rows have different lengths")
    return np.array([[dec_complex(p) for p in r] for r in rows], dtype=complex)


def enc_params(p):
    return {"n": p.n, "m": p.m, "mu": p.mu}


def dec_params(obj):
    validate(obj, PARAMS, "params")
    return DomainParams(obj["n"], obj.get("m", 1), float(obj.get("mu", 1.0)))


def enc_point(p):
    return {"z": enc_vector(p.z), "w": enc_vector(p.w)}


def dec_point(obj):
    validate(obj, POINT, "point")
    return DomainPoint(dec_vector(obj["z"]), dec_vector(obj["w"]))


def enc_aut(g):
    return {"U": enc_matrix(g.U), "W": enc_matrix(g.W), "v": enc_vector(g.v)}


def dec_aut(obj, mu=1.0, what="aut"):
    validate(obj, AUT, what)
    try:
        g = FbhAut(dec_matrix(obj["U"]), dec_matrix(obj["W"]), dec_vector(obj["v"]), mu)
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from None
    res = g.invariant_residual()
    if res > 1e-8:
        raise SchemaError(f"{what}: U or W is not unitary (residual {res:.3e})")
    return g


def dumps(obj):
    """Deterministic single-line JSON."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
