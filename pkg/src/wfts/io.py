"""
Dataset files: UCR-style text corpora and their writer.

Two layouts are read, one series per row:

``tsv_label_first``
    Whitespace or tab separated, first field is the class label (kept as a
    string), the rest are samples.
``csv``
    Comma separated, same column order.

With ``folds=True`` the second field is an integer fold id (a sidecar
column for predefined cross-validation folds).  Blank lines are skipped.
The writer uses ``repr`` for floats, which round-trips doubles exactly.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .errors import ParseError, RaggedRows
from .spectral import TimeSeries
from .synthetic import Dataset

__all__ = ["load_ucr", "save_ucr", "atomic_write", "FORMATS"]

FORMATS = ("tsv_label_first", "csv")


def _split(line, fmt):
    if fmt == "csv":
        return [c.strip() for c in line.split(",")]
    return line.split()


def load_ucr(path, format="tsv_label_first", labeled=True, folds=False,
             sample_rate=1.0, demean=False):
    """Read a row-per-series file into a :class:`Dataset`.

    ``demean`` subtracts each row's mean (the DC component is otherwise
    kept).

    Raises :class:`ParseError` (with 1-based row and column) on unreadable
    values or an empty file, and :class:`RaggedRows` when rows differ in
    length.
    """
    if format not in FORMATS:
        raise ParseError(f"unknown format {format!r}; expected one of {FORMATS}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    lead = int(labeled) + int(folds)
    series, labels, fold_ids = [], [], []
    width = None
    for row, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = _split(line, format)
        if width is None:
            width = len(fields)
            if width <= lead:
                raise ParseError("row has no sample values", row)
        elif len(fields) != width:
            raise RaggedRows(f"expected {width} fields, found {len(fields)}", row)
        col = 0
        if labeled:
            labels.append(fields[0])
            col = 1
        if folds:
            try:
                fold_ids.append(int(fields[col]))
            except ValueError:
                raise ParseError(f"fold id {fields[col]!r} is not an integer",
                                 row, col + 1) from None
            col += 1
        values = np.empty(width - lead)
        for j, tok in enumerate(fields[lead:]):
            try:
                values[j] = float(tok)
            except ValueError:
                raise ParseError(f"cannot parse {tok!r} as a number",
                                 row, lead + j + 1) from None
        if not np.all(np.isfinite(values)):
            col = lead + int(np.flatnonzero(~np.isfinite(values))[0]) + 1
            raise ParseError("non-finite sample value", row, col)
        if demean:
            values -= values.mean()
        series.append(TimeSeries(values, sample_rate, f"row{row}"))
    if not series:
        raise ParseError("file contains no series")
    return Dataset(series, labels if labeled else None,
                   fold_ids if folds else None,
                   source=os.fspath(path), format=format)


def _fmt(x):
    return repr(float(x))


def save_ucr(dataset, path, format="tsv_label_first"):
    """Write ``dataset`` in a layout :func:`load_ucr` reads back exactly."""
    if format not in FORMATS:
        raise ParseError(f"unknown format {format!r}; expected one of {FORMATS}")
    sep = "," if format == "csv" else "\t"
    rows = []
    for i, ts in enumerate(dataset.series):
        if not ts.is_real:
            raise ValueError("only real-valued series can be written")
        fields = []
        if dataset.labels is not None:
            label = str(dataset.labels[i])
            if not label or any(c.isspace() or c == "," for c in label):
                raise ValueError(f"label {label!r} cannot be written unquoted")
            fields.append(label)
        if dataset.fold is not None:
            fields.append(str(int(dataset.fold[i])))
        fields.extend(_fmt(v) for v in ts.samples.real)
        rows.append(sep.join(fields))
    atomic_write(path, "\n".join(rows) + "\n")


def atomic_write(path, text):
    """Write ``text`` to a temporary file next to ``path``, then rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
