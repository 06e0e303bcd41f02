"""CSV/JSON writers shared by the command layer.

Floats are written with ``repr``: the shortest decimal string that parses
back to the same double.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

from .errors import OutputError


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    try:
        return repr(float(value))  # numpy scalars
    except (TypeError, ValueError):
        return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def write_text(path: str | Path | None, text: str) -> None:
    """Write to ``path``; ``None`` or ``-`` means stdout."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def read_csv(path: str | Path) -> tuple[list[str], list[list[float]]]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        # empty cells mark columns that do not apply to a row
        return header, [[float(v) if v else math.nan for v in row] for row in r]
