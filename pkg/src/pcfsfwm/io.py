"""Deterministic CSV/JSON writers and the grid CSV reader."""

from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from pcfsfwm.jsa import GridSpec, SpectralGrid

GRID_COLUMNS = ("omega_s", "omega_i", "re", "im", "abs2")


def format_value(v) -> str:
    """12 significant digits, scientific notation for reals."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.11e}"
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def write_json(path: Path, payload: dict) -> None:
    text = json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")


def grid_rows(grid: SpectralGrid, normalization: str = "unit-l2"):
    g = grid.peak_normalized() if normalization == "peak-1" else grid
    ws, wi = g.spec.omega_s, g.spec.omega_i
    amp = g.amplitude
    for j in range(len(ws)):
        for k in range(len(wi)):
            a = amp[j, k]
            yield (ws[j], wi[k], a.real, a.imag, a.real * a.real + a.imag * a.imag)


def write_grid_csv(path: Path, grid: SpectralGrid, normalization: str = "unit-l2") -> None:
    write_csv(path, GRID_COLUMNS, grid_rows(grid, normalization))


def read_grid_csv(path: Path) -> SpectralGrid:
    """Read a grid written by :func:`write_grid_csv` (row-major, uniform axes)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 4:
        raise ValueError(f"{path}: expected columns {', '.join(GRID_COLUMNS)}")
    ws = np.unique(data[:, 0])
    wi = np.unique(data[:, 1])
    if len(ws) * len(wi) != len(data) or len(ws) < 2 or len(wi) < 2:
        raise ValueError(f"{path}: rows do not form a full rectangular grid")
    order = np.lexsort((data[:, 1], data[:, 0]))
    amp = (data[order, 2] + 1j * data[order, 3]).reshape(len(ws), len(wi))
    spec = GridSpec(0.5 * (ws[0] + ws[-1]), 0.5 * (wi[0] + wi[-1]),
                    0.5 * (ws[-1] - ws[0]), 0.5 * (wi[-1] - wi[0]), len(ws), len(wi))
    return SpectralGrid(spec, amp, "file")
