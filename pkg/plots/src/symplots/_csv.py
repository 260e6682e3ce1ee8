"""CSV intake with loud schema checks.

Loaders return columns as float arrays; blank cells become NaN so that
optional fields (a chaotic sweep row has no period) plot as gaps instead
of crashing. Validation happens before any figure is touched, so a bad
input never leaves a partial image behind.
"""

import csv
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input CSV does not match the documented export schema."""


def read_rows(path) -> tuple[list[str], list[dict]]:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read ({exc.strerror})") from exc
    if not header:
        raise SchemaError(f"{path}: empty file, no header row")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return list(header), rows


def require(path, header: list[str], needed) -> None:
    missing = [name for name in needed if name not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")


def float_column(rows: list[dict], name: str) -> np.ndarray:
    out = np.empty(len(rows))
    for i, row in enumerate(rows):
        cell = (row.get(name) or "").strip()
        out[i] = float(cell) if cell else np.nan
    return out


def load(path, needed) -> dict[str, np.ndarray]:
    """Read ``path`` and return the ``needed`` columns as float arrays."""
    header, rows = read_rows(path)
    require(path, header, needed)
    return {name: float_column(rows, name) for name in needed}
