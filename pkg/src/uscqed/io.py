"""CSV output with ``#``-prefixed metadata headers.

The first header line names the schema and its version; column order is
part of the schema. Undefined values (NaN) are written as empty fields.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

SCHEMAS = {
    "levels": 1,
    "trajectory": 1,
    "statistics": 1,
    "spectrum": 1,
    "peaks": 1,
    "convergence": 1,
    "dissipators": 1,
}


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.12e}"


def write_csv(path, schema: str, columns: list[str], rows, meta: dict | None = None) -> Path:
    """Write ``rows`` (iterables matching ``columns``) to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema: {schema} v{SCHEMAS[schema]}\n")
        for key, value in (meta or {}).items():
            fh.write(f"# {key}: {value}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Parse a file written by :func:`write_csv` into ``(meta, columns, rows)``."""
    meta, lines = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            else:
                lines.append(line)
    reader = csv.reader(lines)
    columns = next(reader)
    return meta, columns, [row for row in reader]
