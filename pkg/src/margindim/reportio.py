"""File formats: spectrum/matrix text files, delimited trial tables, JSON.

Spectra are one eigenvalue per line; matrices are comma- or
whitespace-delimited with one row per line.  CSV trial tables start with a
``# config=...`` line embedding the resolved experiment configuration, and
floats are printed with 17 significant digits so re-running a configuration
reproduces byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = [
    "ParseError",
    "load_spectrum",
    "save_spectrum",
    "load_matrix",
    "save_matrix",
    "load_labeled_matrix",
    "fmt_float",
    "write_csv",
    "write_json",
    "jsonable",
]


class ParseError(ValueError):
    """Malformed numeric text file; carries the 1-based offending line."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}, line {line}: {message}")


def _data_lines(path):
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def load_spectrum(path) -> np.ndarray:
    """Read one eigenvalue per line; returns the raw (unvalidated) array."""
    values = []
    for lineno, line in _data_lines(path):
        fields = line.replace(",", " ").split()
        if len(fields) != 1:
            raise ParseError(path, lineno, f"expected one value, got {len(fields)}")
        try:
            values.append(float(fields[0]))
        except ValueError:
            raise ParseError(path, lineno, f"not a number: {fields[0]!r}") from None
    if not values:
        raise ParseError(path, 1, "no eigenvalues found")
    return np.asarray(values)


def save_spectrum(path, eigenvalues):
    lines = [fmt_float(v) for v in np.asarray(eigenvalues, dtype=float)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    """Read a matrix with one comma/whitespace-delimited row per line."""
    rows = []
    width = None
    for lineno, line in _data_lines(path):
        fields = line.replace(",", " ").split()
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(path, lineno, f"expected {width} columns, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ParseError(path, 1, "no rows found")
    return np.asarray(rows)


def save_matrix(path, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    lines = [",".join(fmt_float(v) for v in row) for row in X]
    Path(path).write_text("\n".join(lines) + "\n")


def load_labeled_matrix(path):
    """Read rows of ``x_1,...,x_d,y`` with labels +-1 in the last column."""
    M = load_matrix(path)
    if M.shape[1] < 2:
        raise ParseError(path, 1, "need at least one feature column plus a label")
    X, y = M[:, :-1], M[:, -1]
    if not np.all(np.abs(y) == 1):
        bad = int(np.flatnonzero(np.abs(y) != 1)[0]) + 1
        raise ParseError(path, bad, "labels in the last column must be +-1")
    return X, y


def fmt_float(v) -> str:
    return "%.17g" % float(v)


def _fmt_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def write_csv(path, columns, rows, config=None):
    """Write a trial table; the optional config is embedded as a comment line."""
    out = []
    if config is not None:
        out.append("# config=" + json.dumps(jsonable(config), sort_keys=True,
                                            separators=(",", ":")))
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(_fmt_cell(v) for v in row))
    Path(path).write_text("\n".join(out) + "\n")


def write_json(path, obj):
    Path(path).write_text(json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n")


def jsonable(obj):
    """Recursively convert numpy scalars/arrays so json.dumps accepts them."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj
