"""Reading and aggregating sweep result CSVs.

This module is deliberately self-contained: it consumes only the documented
CSV format (one row per trial), so it works on result files produced on
another machine without importing the solver package.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: the documented result schema, in column order
EXPECTED_HEADER = (
    "scheme",
    "axis_name",
    "axis_value",
    "sigma2",
    "trial",
    "mse",
    "iters",
    "converged",
    "millis",
)


class SchemaError(ValueError):
    """The CSV does not match the documented schema.

    ``column`` names the offending column so callers can report it.
    """

    def __init__(self, column: str, reason: str) -> None:
        self.column = column
        super().__init__(f"schema mismatch in column {column!r}: {reason}")


@dataclass(frozen=True)
class TrialRow:
    """One per-trial result row."""

    scheme: str
    axis_name: str
    axis_value: float
    sigma2: float
    trial: int
    mse: float
    iters: int
    converged: bool
    millis: float


def _check_header(header: list[str]) -> None:
    expected = list(EXPECTED_HEADER)
    for i, name in enumerate(expected):
        if i >= len(header):
            raise SchemaError(name, "column missing from header")
        if header[i] != name:
            raise SchemaError(name, f"found {header[i]!r} at its position")
    if len(header) > len(expected):
        raise SchemaError(header[len(expected)], "unexpected extra column")


def _parse_row(fields: list[str], line: int) -> TrialRow:
    if len(fields) != len(EXPECTED_HEADER):
        missing = EXPECTED_HEADER[min(len(fields), len(EXPECTED_HEADER) - 1)]
        raise SchemaError(missing, f"row {line} has {len(fields)} fields, expected {len(EXPECTED_HEADER)}")

    def number(column: str, raw: str, cast) -> float | int:
        try:
            return cast(raw)
        except ValueError:
            raise SchemaError(column, f"row {line}: cannot parse {raw!r}") from None

    converged_raw = fields[7]
    if converged_raw not in ("true", "false"):
        raise SchemaError("converged", f"row {line}: expected true/false, found {converged_raw!r}")
    return TrialRow(
        scheme=fields[0],
        axis_name=fields[1],
        axis_value=float(number("axis_value", fields[2], float)),
        sigma2=float(number("sigma2", fields[3], float)),
        trial=int(number("trial", fields[4], int)),
        mse=float(number("mse", fields[5], float)),
        iters=int(number("iters", fields[6], int)),
        converged=converged_raw == "true",
        millis=float(number("millis", fields[8], float)),
    )


def read_rows(path: str | Path) -> list[TrialRow]:
    """Parse a result CSV; raises :class:`SchemaError` on any mismatch."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(EXPECTED_HEADER[0], "file has no header row") from None
        _check_header(header)
        return [_parse_row(fields, line) for line, fields in enumerate(reader, start=2)]


@dataclass(frozen=True)
class SeriesPoint:
    """Mean and standard error of the MSE at one grid point of one series."""

    axis_value: float
    mean: float
    stderr: float
    count: int


def aggregate(rows: list[TrialRow]) -> dict[tuple[str, float], list[SeriesPoint]]:
    """Per-(scheme, error level) series of trial statistics, sorted by axis.

    The standard error is the ddof=1 sample standard deviation over trials
    divided by ``sqrt(count)``; a single-trial cell reports 0.
    """
    cells: dict[tuple[str, float, float], list[float]] = {}
    for r in rows:
        cells.setdefault((r.scheme, r.sigma2, r.axis_value), []).append(r.mse)
    series: dict[tuple[str, float], list[SeriesPoint]] = {}
    for (scheme, sigma2, axis_value), values in sorted(cells.items()):
        arr = np.asarray(values)
        stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        series.setdefault((scheme, sigma2), []).append(
            SeriesPoint(axis_value=axis_value, mean=float(arr.mean()), stderr=stderr, count=int(arr.size))
        )
    return series
