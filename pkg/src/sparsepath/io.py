"""CSV readers and writers for designs, responses, group labels and results.

Rows are observations. A header row is optional: the first row is treated
as a header when none of its fields parses as a number.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from .errors import ParseError, RaggedRows


def _parse(text):
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def _is_header(row):
    return all(_parse(cell.strip()) is None for cell in row)


def read_csv_matrix(path, header="auto"):
    """Parse a numeric CSV. Returns ``(matrix, column_names or None)``.

    ``header`` is ``"auto"``, ``True`` or ``False``.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ParseError(path, 1, 1, "")
    names = None
    first_line = 1
    if header is True or (header == "auto" and _is_header(rows[0])):
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_line = 2
    if not rows:
        raise ParseError(path, first_line, 1, "")
    width = len(names) if names is not None else len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        line = first_line + i
        if len(row) != width:
            raise RaggedRows(path, line, width, len(row))
        for j, cell in enumerate(row):
            v = _parse(cell.strip())
            if v is None:
                raise ParseError(path, line, j + 1, cell)
            out[i, j] = v
    return out, names


def load_matrix(path, header="auto"):
    return read_csv_matrix(path, header)[0]


def load_vector(path, header="auto"):
    """A single column (or a single row) of numbers as a 1-D array."""
    m, _ = read_csv_matrix(path, header)
    if m.shape[1] == 1:
        return m[:, 0]
    if m.shape[0] == 1:
        return m[0]
    raise RaggedRows(path, 1, 1, m.shape[1])


def load_groups(path):
    """One group label per line, in column order. Labels are kept as strings."""
    labels = []
    with open(path, newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            if len(cells) != 1:
                raise RaggedRows(path, line_no, 1, len(cells))
            labels.append(cells[0])
    if labels and labels[0].lower() in ("group", "groups", "label"):
        labels = labels[1:]
    return np.asarray(labels)


def write_matrix(path, matrix, header=None):
    """Write with 17 significant digits so float64 values round-trip exactly."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for row in matrix:
            w.writerow([format(v, ".17g") for v in row])


def write_rows(path, header, rows):
    """Write pre-formatted mixed-type rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
