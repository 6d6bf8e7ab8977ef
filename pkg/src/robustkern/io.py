"""CSV loading for sample files.

One sample per row, comma separated, decimal point. A single header row is
accepted and detected by its first row containing a non-numeric cell.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from robustkern.errors import DataError


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path) -> np.ndarray:
    """Read a numeric CSV into an (rows, columns) float array."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in row)]
    except OSError as exc:
        raise DataError(f"{path}: cannot read ({exc.strerror})") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    if not all(_is_number(c.strip()) for c in rows[0][1]):
        rows = rows[1:]
    width = None
    values = []
    for lineno, row in rows:
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DataError(f"{path}: row {lineno} has {len(row)} columns, expected {width}")
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                v = float(cell.strip())
            except ValueError:
                raise DataError(f"{path}: row {lineno}, column {col}: non-numeric value {cell!r}") from None
            if not np.isfinite(v):
                raise DataError(f"{path}: row {lineno}, column {col}: non-finite value {cell!r}")
            parsed.append(v)
        values.append(parsed)
    if not values:
        raise DataError(f"{path}: header only, no data rows")
    return np.array(values, dtype=float)


def write_csv(path, array, header=None) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for row in np.atleast_2d(array):
            w.writerow([repr(float(v)) for v in row])
