"""CSV ingestion."""

import csv
from pathlib import Path

import numpy as np

from ..errors import IngestionError


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _same_label(a, b):
    if a == b:
        return True
    if _is_number(a) and _is_number(b):
        return float(a) == float(b)
    return False


def load_csv(path, label_column=None, keep_labels=None, scale=None):
    """Read a numeric feature matrix from a comma-separated file.

    A first row containing any non-numeric cell is treated as a header.
    ``label_column`` (a header name, or a 0-based index) is dropped from the
    features; when ``keep_labels`` is given only rows whose label matches one
    of them are kept.  Features are multiplied by ``scale`` when given.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise IngestionError(f"{path} contains no data")
    header = None
    if not all(_is_number(c.strip()) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_line = 2
    else:
        first_line = 1
    if not rows:
        raise IngestionError(f"{path} has a header but no data rows")
    width = len(header) if header else len(rows[0])

    label_idx = None
    if label_column is not None:
        if header and str(label_column) in header:
            label_idx = header.index(str(label_column))
        elif str(label_column).lstrip("-").isdigit():
            label_idx = int(label_column) % width
        else:
            raise IngestionError(f"label column {label_column!r} not found in header")

    keep = None if keep_labels is None else [str(k).strip() for k in keep_labels]
    features = []
    for offset, row in enumerate(rows):
        line = first_line + offset
        if len(row) != width:
            raise IngestionError(f"expected {width} cells, found {len(row)}", row=line)
        if label_idx is not None:
            label = row[label_idx].strip()
            if keep is not None and not any(_same_label(label, k) for k in keep):
                continue
        values = []
        for col, cell in enumerate(row):
            if col == label_idx:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                name = header[col] if header else col + 1
                raise IngestionError(f"non-numeric cell {cell!r}", row=line, column=name) from None
        features.append(values)
    if not features:
        raise IngestionError("no rows left after label filtering")
    X = np.asarray(features, dtype=float)
    if X.shape[1] == 0:
        raise IngestionError("no feature columns")
    if scale is not None:
        X = X * float(scale)
    return X
