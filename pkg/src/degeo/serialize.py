"""Deterministic JSON output: fixed key order (insertion order of the
builders), floats at 17 significant digits so doubles round-trip."""
from __future__ import annotations

import numpy as np


def _fmt_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(float(x), ".17g")


def dumps(obj, indent: int | None = None) -> str:
    return _write(obj, indent, 0)


def _write(obj, indent, depth):
    nl, pad, pad1 = "", "", ""
    if indent is not None:
        nl = "\n"
        pad = " " * (indent * (depth + 1))
        pad1 = " " * (indent * depth)
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
        return f'"{out}"'
    if isinstance(obj, np.ndarray):
        return _write(obj.tolist(), indent, depth)
    if isinstance(obj, (list, tuple)):
        items = [_write(x, indent, depth + 1) for x in obj]
        if not items:
            return "[]"
        return "[" + nl + ("," + nl).join(pad + s for s in items) + nl + pad1 + "]"
    if isinstance(obj, dict):
        items = [f'"{k}": ' + _write(v, indent, depth + 1) for k, v in obj.items()]
        if not items:
            return "{}"
        return "{" + nl + ("," + nl).join(pad + s for s in items) + nl + pad1 + "}"
    raise TypeError(f"cannot serialize {type(obj)}")
