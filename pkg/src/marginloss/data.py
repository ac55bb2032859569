"""Labelled datasets and their CSV form.

CSV layout: optional ``#`` comment lines (the CLI writes its resolved
configuration there), a header row, a label column named ``y`` holding
``-1/1`` or ``0/1`` (0 is read as -1), and numeric feature columns.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError, EmptyDatasetError, LabelError, ParameterError

__all__ = ["Dataset", "read_csv", "write_csv", "fmt", "write_table", "read_table"]


def fmt(x) -> str:
    """17 significant digits: lossless for float64."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Dataset:
    """Immutable ``(x_i, y*_i)`` rows with ``y* in {-1, +1}``."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple = field(default=())

    def __post_init__(self):
        X = np.array(self.X, dtype=float, copy=True)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise ParameterError("features must be a 2-D array")
        y = np.asarray(self.y)
        if y.shape != (X.shape[0],):
            raise ParameterError(f"{y.shape[0] if y.ndim else 0} labels for {X.shape[0]} rows")
        if X.shape[0] == 0:
            raise EmptyDatasetError("empty dataset")
        if not np.isfinite(X).all():
            raise DomainError("features must be finite")
        if not np.isin(y, (-1, 1)).all():
            raise LabelError("labels must be -1 or +1")
        y = y.astype(np.int8)
        X.flags.writeable = False
        y.flags.writeable = False
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ParameterError("feature_names length does not match the feature count")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx], self.feature_names)


def _data_lines(text: str):
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def read_csv(path) -> Dataset:
    text = Path(path).read_text()
    lines = _data_lines(text)
    if not lines:
        raise EmptyDatasetError("empty dataset")
    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader)]
    if "y" not in header:
        raise ParameterError("CSV header needs a label column named 'y'")
    rows = list(reader)
    if not rows:
        raise EmptyDatasetError("empty dataset")
    try:
        table = np.array([[float(v) for v in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ParameterError(f"non-numeric CSV value: {exc}") from None
    if table.shape[1] != len(header):
        raise ParameterError("ragged CSV rows")
    j = header.index("y")
    raw = table[:, j]
    values = set(np.unique(raw).tolist())
    if values <= {-1.0, 1.0}:
        y = raw
    elif values <= {0.0, 1.0}:
        y = np.where(raw == 0.0, -1.0, 1.0)
    else:
        raise LabelError(f"labels must be in {{-1, 1}} or {{0, 1}}, got {sorted(values)[:4]}")
    names = tuple(h for i, h in enumerate(header) if i != j)
    X = np.delete(table, j, axis=1)
    return Dataset(X, y.astype(np.int8), names)


def write_table(path, header, columns, comment: Optional[dict] = None, delimiter=","):
    """Write equal-length columns with a header and an optional JSON comment line."""
    buf = io.StringIO()
    if comment is not None:
        buf.write("# " + json.dumps(comment, sort_keys=True) + "\n")
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def read_table(path, delimiter=","):
    """Read a table written by :func:`write_table`: ``(header, float array)``."""
    lines = _data_lines(Path(path).read_text())
    reader = csv.reader(lines, delimiter=delimiter)
    header = next(reader)
    rows = [[float(v) for v in r] for r in reader]
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))


def write_csv(path, data: Dataset, comment: Optional[dict] = None):
    cols = [data.y.astype(int)] + [data.X[:, j] for j in range(data.p)]
    write_table(path, ["y", *data.feature_names], cols, comment)
