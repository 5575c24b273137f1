"""CSV loaders for the two simulator output schemas.

The metrics schema is one header row of column names followed by data rows
(strings stay strings, everything numeric becomes float, absent values are
NaN). The map schema has a Doppler-frequency header and a leading
delay-bin column.
"""

import csv

import numpy as np


class SchemaError(ValueError):
    """Input CSV does not match the documented schema."""


def load_metrics_csv(path):
    """Metrics CSV as {column: list}; numeric columns become float lists."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        rows = [row for row in reader if row]
    columns = {name: [] for name in header}
    for row in rows:
        if len(row) != len(header):
            raise SchemaError(f"{path}: row width {len(row)} != header width {len(header)}")
        for name, value in zip(header, row):
            columns[name].append(value)
    for name, values in columns.items():
        try:
            columns[name] = [float(v) for v in values]
        except ValueError:
            pass  # stays a string column (scenario, method, mode)
    return columns


def require_columns(columns, names, path=""):
    for name in names:
        if name not in columns:
            raise SchemaError(f"{path}: missing column {name!r} (have {sorted(columns)})")


def load_rdm_csv(path):
    """Map CSV -> (delay_samples, doppler_hz, magnitudes)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[0] != "delay_samples" or len(header) < 2:
        raise SchemaError(f"{path}: expected 'delay_samples,<doppler Hz>...' header, got {header[:3]}")
    try:
        doppler = np.array([float(v) for v in header[1:]])
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric cell ({exc})") from None
    width = len(header)
    if any(len(r) != width for r in rows):
        raise SchemaError(f"{path}: ragged rows")
    grid = np.array(rows)
    return grid[:, 0], doppler, grid[:, 1:]
