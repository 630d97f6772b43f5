"""CSV ingestion and emission for the command-line tools.

Datasets are plain CSV files with a header.  The response column must be
named ``y``; every other column is treated as a covariate, in header order.
Values already on an interval (a, b) other than the unit interval can be
mapped at ingestion by passing the interval bounds.
"""

import csv

import numpy as np

from .model import Sample
from .simulate import rescale_to_unit

__all__ = ["DatasetError", "read_dataset", "write_dataset", "read_matrix_csv", "write_forecast_csv"]


class DatasetError(ValueError):
    """Input-file problem, carrying the offending 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def read_dataset(path, rescale=None) -> Sample:
    """Read a sample from CSV; ``rescale=(a, b)`` maps values onto (0, 1)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("empty file") from None
        header = [name.strip() for name in header]
        if "y" not in header:
            raise DatasetError("missing required column 'y'", line=1)
        y_col = header.index("y")
        cov_cols = [i for i in range(len(header)) if i != y_col]

        ys, rows = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"expected {len(header)} fields, found {len(row)}", line=line_no
                )
            try:
                ys.append(float(row[y_col]))
                rows.append([float(row[i]) for i in cov_cols])
            except ValueError as exc:
                raise DatasetError(str(exc), line=line_no) from None

    if not ys:
        raise DatasetError("no data rows")
    y = np.array(ys)
    if rescale is not None:
        y = rescale_to_unit(y, *rescale)
    x = np.array(rows) if cov_cols else None
    try:
        return Sample(y=y, x=x)
    except ValueError as exc:
        raise DatasetError(str(exc)) from None


def write_dataset(path, y, x=None, cov_names=None):
    """Write a sample as CSV (column ``y`` plus any covariate columns)."""
    y = np.asarray(y, dtype=float)
    if x is not None and np.asarray(x).size:
        x = np.asarray(x, dtype=float)
        names = cov_names or [f"x{i}" for i in range(1, x.shape[1] + 1)]
    else:
        x, names = None, []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y"] + list(names))
        for i, value in enumerate(y):
            row = [repr(float(value))]
            if x is not None:
                row += [repr(float(v)) for v in x[i]]
            writer.writerow(row)


def read_matrix_csv(path):
    """Read a plain numeric CSV (with header) into a 2-D array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("empty file") from None
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"expected {len(header)} fields, found {len(row)}", line=line_no
                )
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise DatasetError(str(exc), line=line_no) from None
    if not rows:
        raise DatasetError("no data rows")
    return np.array(rows)


def write_forecast_csv(path, predictions):
    """Forecast output: one row per step with columns step, prediction."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "prediction"])
        for step, value in enumerate(predictions, start=1):
            writer.writerow([step, repr(float(value))])
