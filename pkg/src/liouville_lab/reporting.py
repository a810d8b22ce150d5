"""Deterministic CSV/JSON emission.

Every number is rendered through the same fixed-format path (17
significant digits, '.' decimal separator) and every file ends with a
single trailing '\\n', so identical inputs produce byte-identical files
on any platform. CSV is the canonical table format (one header row,
comma-separated, no quoting — field values never contain commas); JSON
is the canonical summary format. Non-finite floats appear as nan/inf in
CSV and as null in JSON, which stays parseable by strict readers.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import InvalidInputs

Cell = Union[bool, int, float, str, None]


def _coerce(value):
    """Fold numpy scalars into plain Python scalars before rendering."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def fmt_float(x: float) -> str:
    """Fixed 17-significant-digit rendering; the determinism choke point."""
    return "%.17g" % float(x)


def _csv_cell(value: Cell) -> str:
    value = _coerce(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    if value is None:
        return ""
    text = str(value)
    if "," in text or "\n" in text:
        raise InvalidInputs(f"CSV cell may not contain separators: {text!r}")
    return text


def render_csv(rows: Sequence[Mapping[str, Cell]]) -> str:
    if not rows:
        raise InvalidInputs("refusing to write a CSV with no rows")
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        if list(row.keys()) != header:
            raise InvalidInputs("CSV rows must share one set of columns")
        lines.append(",".join(_csv_cell(row[key]) for key in header))
    return "\n".join(lines) + "\n"


def _render_json(value, indent: int, out: list) -> None:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    value = _coerce(value)
    if isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(fmt_float(value) if math.isfinite(value) else "null")
    elif value is None:
        out.append("null")
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=True))
    elif isinstance(value, Mapping):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, item) in enumerate(value.items()):
            if not isinstance(key, str):
                raise InvalidInputs(f"JSON keys must be strings, got {key!r}")
            out.append(f"{inner}{json.dumps(key, ensure_ascii=True)}: ")
            _render_json(item, indent + 1, out)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not len(value):
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(value):
            out.append(inner)
            _render_json(item, indent + 1, out)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise InvalidInputs(f"cannot serialize {type(value).__name__} to JSON")


def render_json(value) -> str:
    out: list[str] = []
    _render_json(value, 0, out)
    return "".join(out) + "\n"


def write_csv(path, rows: Sequence[Mapping[str, Cell]]) -> Path:
    return _write(path, render_csv(rows))


def write_json(path, value) -> Path:
    return _write(path, render_json(value))


def _write(path, text: str) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    return path
