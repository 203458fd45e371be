"""Deterministic CSV output: 17 significant digits, '.' decimal point,
'\\n' line endings, header always present, non-finite values refused."""

from __future__ import annotations

import math
from pathlib import Path

from .errors import CsvWriteError


def format_value(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise CsvWriteError(f"non-finite value {v!r} refused")
        if v == 0.0:
            v = 0.0  # drop the sign of negative zero
        return f"{v:.17g}"
    if isinstance(v, str):
        if any(c in v for c in (",", '"', "\n", "\r")):
            return '"' + v.replace('"', '""') + '"'
        return v
    if isinstance(v, complex):
        raise CsvWriteError("split complex values into _re/_im columns")
    try:
        return format_value(float(v))
    except (TypeError, ValueError) as exc:
        raise CsvWriteError(f"cannot format {v!r} for CSV") from exc


def render_csv(rows, schema) -> str:
    lines = [",".join(str(c) for c in schema)]
    width = len(schema)
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != width:
            raise CsvWriteError(
                f"row {i} has {len(row)} fields, schema has {width}"
            )
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_csv(rows, schema, destination) -> None:
    """Write rows under the declared column schema.

    ``destination`` is a path or a writable text file object.
    """
    text = render_csv(rows, schema)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(Path(destination), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CsvWriteError(f"cannot write {destination!r}: {exc}") from exc
