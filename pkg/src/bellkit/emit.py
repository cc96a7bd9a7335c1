"""Deterministic JSON and CSV writers.

Identical inputs must produce byte-identical files, so floats are printed
with a fixed repr ("%.17g", enough digits to round-trip a double), dict
order is insertion order, and line endings are always "\n".  Non-finite
floats become JSON null.  Writes go through a temp file in the target
directory followed by os.replace, so readers never see a partial file.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any, Iterable

import numpy as np


def format_float(x: float) -> str:
    """Render a float for JSON or CSV; non-finite values become "null"."""
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def _render(obj: Any, indent: int, out: list) -> None:
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        # bool is an int subclass; test it first
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise TypeError(f"JSON object keys must be str, got {type(k).__name__}")
            out.append(f'{pad}  {json.dumps(k)}: ')
            _render(v, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not len(obj):
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _render(v, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    out: list = []
    _render(obj, 0, out)
    out.append("\n")
    return "".join(out)


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    except OSError as exc:
        # Report the path the caller asked for, not the temp name.
        raise OSError(exc.errno, exc.strerror, path) from None
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json(path: str, obj: Any) -> None:
    _write_atomic(path, dumps(obj))


def write_histogram_csv(path: str, edges, counts, density) -> None:
    lines = ["bin_left,bin_right,count,density\n"]
    for left, right, cnt, dens in zip(edges[:-1], edges[1:], counts, density):
        lines.append(
            f"{format_float(float(left))},{format_float(float(right))},"
            f"{int(cnt)},{format_float(float(dens))}\n"
        )
    _write_atomic(path, "".join(lines))


def write_scatter_csv(path: str, pairs: Iterable) -> None:
    lines = ["fidelity,bell_value\n"]
    for fid, val in pairs:
        lines.append(f"{format_float(float(fid))},{format_float(float(val))}\n")
    _write_atomic(path, "".join(lines))
