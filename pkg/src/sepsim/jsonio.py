"""JSON encoding of complex matrices and vectors.

Complex numbers are ``[re, im]`` pairs; matrices are flat row-major lists of
pairs (nested row lists are accepted on input).  Floats are written with 17
significant digits so every double survives a round trip.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import SchemaError


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m) -> list:
    return [encode_complex(z) for z in np.asarray(m).reshape(-1)]


def _decode_pair(p, where) -> complex:
    if (not isinstance(p, (list, tuple)) or len(p) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in p)):
        raise SchemaError(f"{where}: expected a [re, im] pair, got {p!r}")
    z = complex(float(p[0]), float(p[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SchemaError(f"{where}: non-finite entry")
    return z


def decode_vector(obj, dim: int, where: str = "vector") -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != dim:
        raise SchemaError(f"{where}: expected {dim} [re, im] pairs")
    return np.array([_decode_pair(p, where) for p in obj], dtype=complex)


def decode_matrix(obj, dim: int, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list):
        raise SchemaError(f"{where}: expected a list")
    if len(obj) == dim and all(isinstance(r, list) and len(r) == dim
                               and all(isinstance(p, list) for p in r) for r in obj):
        flat = [p for row in obj for p in row]
    elif len(obj) == dim * dim:
        flat = obj
    else:
        raise SchemaError(f"{where}: expected a {dim}x{dim} matrix of [re, im] pairs")
    return np.array([_decode_pair(p, where) for p in flat], dtype=complex).reshape(dim, dim)


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError("non-finite float cannot be encoded")
    if x == 0:
        return "0.0" if math.copysign(1.0, x) > 0 else "-0.0"
    out = format(x, ".17g")
    # keep floats recognisable as floats ("1" -> "1.0")
    return out if any(ch in out for ch in ".en") else out + ".0"


def dumps(obj, indent: int | None = None) -> str:
    """``json.dumps`` with floats written to 17 significant digits."""
    def enc(o, level):
        pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
        end = "" if indent is None else "\n" + " " * (indent * level)
        sep = ", " if indent is None else ","
        if isinstance(o, bool) or o is None or isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [pad + json.dumps(str(k)) + ": " + enc(v, level + 1) for k, v in o.items()]
            return "{" + sep.join(items) + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            # keep numeric leaves ([re, im] pairs) on one line
            if indent is not None and all(not isinstance(v, (list, tuple, dict)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[" + sep.join(pad + enc(v, level + 1) for v in o) + end + "]"
        raise TypeError(f"cannot encode {type(o).__name__}")
    return enc(obj, 0)


def loads(text) -> object:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError(f"not UTF-8: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from None
