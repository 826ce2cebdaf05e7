# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The metafourier Authors
"""Metasurface Fourier-transform link simulator.

The compiled core lives in ``metafourier._core``; this package re-exports it and adds pure-Python
readers for the two exchange formats written by scenario runs (grid CSV and ``summary.txt``), so
plotting code can consume results without the extension module.
"""

from __future__ import annotations

import math
import pathlib
from typing import Dict, List, NamedTuple, Optional

try:
    from ._core import *  # noqa: F401,F403
    from ._core import Error, oracle  # noqa: F401
except ImportError:  # pragma: no cover - readers below remain usable
    pass


class GridCsv(NamedTuple):
    """A complex field read from a grid CSV file."""

    stage: str
    nx: int
    ny: int
    dx: float
    dy: float
    cx: float
    cy: float
    x: List[float]
    y: List[float]
    values: List[complex]  # row-major, x fastest

    def power(self) -> float:
        return sum(abs(v) ** 2 for v in self.values) * self.dx * self.dy


def _header_fields(line: str) -> Dict[str, str]:
    fields = {}
    for token in line.lstrip("#").replace(",", " ").split():
        if "=" in token:
            key, value = token.split("=", 1)
            fields[key] = value
    return fields


def read_grid_csv_text(text: str) -> GridCsv:
    """Parse the grid CSV format: ``#`` metadata lines, a column header, then one row per node."""
    meta: Dict[str, str] = {}
    rows = []
    columns: Optional[List[str]] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta.update(_header_fields(line))
            continue
        if columns is None:
            columns = [c.strip() for c in line.split(",")]
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise ValueError(f"line {number}: expected {len(columns)} columns, got {len(parts)}")
        rows.append(dict(zip(columns, (float(p) for p in parts))))
    for key in ("nx", "ny", "dx", "dy", "cx", "cy"):
        if key not in meta:
            raise ValueError(f"missing header field '{key}'")
    nx, ny = int(meta["nx"]), int(meta["ny"])
    if len(rows) != nx * ny:
        raise ValueError(f"expected {nx * ny} rows, got {len(rows)}")
    values = [complex(r["re"], r["im"]) for r in rows]
    xs = [r["x"] for r in rows[:nx]]
    ys = [rows[j * nx]["y"] for j in range(ny)]
    return GridCsv(meta.get("stage", ""), nx, ny, float(meta["dx"]), float(meta["dy"]),
                   float(meta["cx"]), float(meta["cy"]), xs, ys, values)


def read_grid_csv_file(path) -> GridCsv:
    return read_grid_csv_text(pathlib.Path(path).read_text())


class Summary(NamedTuple):
    labels: Dict[str, str]
    values: Dict[str, float]


def read_summary_file(path) -> Summary:
    """Parse ``summary.txt``: ``key=value`` lines; ``label.*`` keys are text, the rest numbers."""
    labels: Dict[str, str] = {}
    values: Dict[str, float] = {}
    for number, raw in enumerate(pathlib.Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {number}: expected key=value")
        key, value = line.split("=", 1)
        if key.startswith("label."):
            labels[key[len("label."):]] = value
        else:
            values[key] = float(value)
            if not math.isfinite(values[key]):
                raise ValueError(f"line {number}: non-finite value for '{key}'")
    return Summary(labels, values)
