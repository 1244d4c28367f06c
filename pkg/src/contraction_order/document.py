"""JSON document format shared by every CLI input and output.

Matrices are written as ``{"type": "matrix", "dtype": ..., "rows": r,
"cols": c, "data": [[re, im], ...]}`` in row-major order.  Floats use
Python's shortest round-trip repr, so ``parse(emit(x))`` restores every
array bit for bit.  Output keys are sorted and indented, which makes
documents diff-able and byte-stable.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Any

import numpy as np

from .errors import DocumentError
from .numerics import Subspace

__all__ = [
    "encode",
    "emit",
    "parse",
    "decode",
    "matrix_from_node",
    "format_path",
    "locate",
]

_DTYPES = {"int": np.int64, "real": np.float64, "complex": np.complex128}


def _float(x: float):
    if math.isfinite(x):
        return x
    return {"type": "float", "repr": repr(x)}


def _matrix(a: np.ndarray) -> dict:
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if np.issubdtype(a.dtype, np.integer) or a.dtype == bool:
        dtype, flat = "int", [[int(v), 0] for v in a.ravel()]
    elif np.iscomplexobj(a):
        dtype, flat = "complex", [[_float(float(v.real)), _float(float(v.imag))] for v in a.ravel()]
    else:
        dtype, flat = "real", [[_float(float(v)), 0.0] for v in a.ravel()]
    return {"type": "matrix", "dtype": dtype, "rows": a.shape[0], "cols": a.shape[1], "data": flat}


def encode(obj: Any) -> Any:
    """Turn arrays, subspaces, dataclasses and numpy scalars into a JSON tree."""
    if isinstance(obj, np.ndarray):
        if obj.ndim == 3:
            return [_matrix(b) for b in obj]
        if obj.ndim == 0:
            return encode(obj.item())
        return _matrix(obj)
    if isinstance(obj, Subspace):
        return {"type": "subspace", "ambient_dim": obj.ambient_dim, "dim": obj.dim, "frame": _matrix(obj.frame)}
    if hasattr(obj, "to_dict"):
        return encode(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return encode({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__}")


def emit(obj: Any) -> str:
    return json.dumps(encode(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def format_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def locate(text: str, parts) -> int:
    """Character index where the value at ``parts`` starts in ``text``."""
    dec = json.JSONDecoder()
    i = _skip_ws(text, 0)
    for part in parts:
        if text[i] == "{":
            i = _skip_ws(text, i + 1)
            while text[i] != "}":
                key, i = json.decoder.scanstring(text, i + 1)
                i = _skip_ws(text, _skip_ws(text, i) + 1)
                if key == part:
                    break
                _, i = dec.raw_decode(text, i)
                i = _skip_ws(text, i)
                if text[i] == ",":
                    i = _skip_ws(text, i + 1)
            else:
                return i
        elif text[i] == "[":
            i = _skip_ws(text, i + 1)
            for _ in range(int(part)):
                _, i = dec.raw_decode(text, i)
                i = _skip_ws(text, i)
                if text[i] == ",":
                    i = _skip_ws(text, i + 1)
        else:
            return i
    return i


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Decoder:
    def __init__(self, text: str):
        self.text = text

    def fail(self, msg: str, parts):
        try:
            offset = _byte_offset(self.text, locate(self.text, parts))
        except (ValueError, IndexError, KeyError):
            offset = None
        raise DocumentError(msg, format_path(parts), offset)

    def number(self, v, parts) -> float:
        if isinstance(v, dict) and v.get("type") == "float":
            return float(v["repr"])
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(f"expected a number, got {type(v).__name__}", parts)
        return float(v)

    def matrix(self, node, parts) -> np.ndarray:
        if isinstance(node, list):
            return self.nested(node, parts)
        for key in ("rows", "cols", "data"):
            if key not in node:
                self.fail(f"matrix is missing {key!r}", parts)
        r, c, data = node["rows"], node["cols"], node["data"]
        if not (isinstance(r, int) and isinstance(c, int)) or r < 0 or c < 0:
            self.fail("rows and cols must be non-negative integers", parts)
        if not isinstance(data, list) or len(data) != r * c:
            self.fail(f"data must hold rows*cols = {r * c} entries", parts + ["data"])
        dtype = node.get("dtype", "complex")
        if dtype not in _DTYPES:
            self.fail(f"unknown dtype {dtype!r}", parts + ["dtype"])
        vals = np.empty(r * c, dtype=complex)
        for k, e in enumerate(data):
            here = parts + ["data", k]
            if isinstance(e, list):
                if len(e) != 2:
                    self.fail("entries must be [re, im] pairs", here)
                vals[k] = complex(self.number(e[0], here + [0]), self.number(e[1], here + [1]))
            else:
                vals[k] = self.number(e, here)
        out = vals.reshape(r, c)
        if dtype == "int":
            return out.real.astype(np.int64)
        if dtype == "real":
            return out.real.copy()
        return out

    def nested(self, rows, parts) -> np.ndarray:
        if not rows or not all(isinstance(row, list) for row in rows):
            self.fail("matrix must be a non-empty list of rows", parts)
        width = len(rows[0])
        out = np.empty((len(rows), width), dtype=complex)
        for i, row in enumerate(rows):
            if len(row) != width:
                self.fail(f"row {i} has {len(row)} entries, expected {width}", parts + [i])
            for j, e in enumerate(row):
                if isinstance(e, list):
                    if len(e) != 2:
                        self.fail("entries must be numbers or [re, im] pairs", parts + [i, j])
                    out[i, j] = complex(self.number(e[0], parts + [i, j, 0]), self.number(e[1], parts + [i, j, 1]))
                else:
                    out[i, j] = self.number(e, parts + [i, j])
        return out

    def tree(self, node, parts):
        if isinstance(node, dict):
            kind = node.get("type")
            if kind == "matrix":
                return self.matrix(node, parts)
            if kind == "float":
                return self.number(node, parts)
            if kind == "subspace":
                if "frame" not in node:
                    self.fail("subspace is missing 'frame'", parts)
                return Subspace(self.matrix(node["frame"], parts + ["frame"]))
            return {k: self.tree(v, parts + [k]) for k, v in node.items()}
        if isinstance(node, list):
            return [self.tree(v, parts + [i]) for i, v in enumerate(node)]
        return node


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(e.msg, "$", _byte_offset(text, e.pos)) from None


def parse(text: str) -> Any:
    """Inverse of :func:`emit`: typed nodes become arrays and subspaces."""
    return _Decoder(text).tree(_load(text), [])


def decode(text: str) -> Any:
    """Plain JSON tree (no typed-node conversion), with located syntax errors."""
    return _load(text)


def matrix_from_node(text: str, parts) -> np.ndarray:
    """Read the matrix at ``parts`` of the document ``text``.

    Accepts typed matrix nodes, ``{"rows", "cols", "data"}`` without a type
    tag, and nested row lists of numbers or ``[re, im]`` pairs.
    """
    dec = _Decoder(text)
    node = _load(text)
    for k, p in enumerate(parts):
        try:
            node = node[p]
        except (KeyError, IndexError, TypeError):
            dec.fail(f"no entry {p!r}", list(parts[:k]))
    if not isinstance(node, (dict, list)):
        dec.fail("expected a matrix", list(parts))
    return dec.matrix(node, list(parts))
