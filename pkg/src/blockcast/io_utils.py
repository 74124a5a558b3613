"""Serialization helpers.

All floats that leave the process go through :func:`fmt_float` (nine
significant digits) so that repeated runs of the same pipeline produce
byte-identical files.  JSON documents are written with a stable key order
and a trailing newline for the same reason.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable

from .errors import SchemaError

FLOAT_FMT = "%.9g"


def fmt_float(x) -> str:
    """Format a float with 9 significant digits."""
    if isinstance(x, float) and not math.isfinite(x):
        raise SchemaError(f"non-finite float cannot be serialized: {x!r}")
    return FLOAT_FMT % float(x)


def round9(obj):
    """Recursively round floats in a JSON-able structure to 9 significant digits."""
    if isinstance(obj, float):
        return float(fmt_float(obj))
    if isinstance(obj, dict):
        return {k: round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round9(v) for v in obj]
    return obj


def dump_json(path, obj) -> None:
    """Write a JSON document deterministically (rounded floats, LF newline)."""
    text = json.dumps(round9(obj), indent=2, ensure_ascii=False)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON in {path}: {exc}") from exc


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable[Any]]) -> None:
    """Write a CSV with formatted floats; ints and strings pass through."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header))
        fh.write("\n")
        for row in rows:
            cells = []
            for cell in row:
                if isinstance(cell, float):
                    cells.append(fmt_float(cell))
                else:
                    cells.append(str(cell))
            fh.write(",".join(cells))
            fh.write("\n")


def read_csv(path, expected_header: list[str] | None = None):
    """Read a CSV into a list of string rows, checking the header."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaError(f"{path} is empty")
    header = lines[0].split(",")
    if expected_header is not None and header != expected_header:
        raise SchemaError(
            f"{path} header mismatch: expected {expected_header}, got {header}"
        )
    return header, [line.split(",") for line in lines[1:]]


def ensure_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
