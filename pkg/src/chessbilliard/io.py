"""Writers for scan grids and orbit dumps."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .scan import ScanGrid


def _num(v) -> str:
    return "" if v is None else repr(v)


def write_csv(grid: ScanGrid, path, header=None) -> None:
    """One row per cell, row-major; ``p`` and ``q`` empty when unresolved."""
    x, y = grid.meta.get("x", "theta1"), grid.meta.get("y", "theta2")
    header = header or [x, y, "rho", "err", "p", "q"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in grid.rows():
            w.writerow([_num(v) for v in row])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def pgm_bytes(grid: ScanGrid) -> bytes:
    """Binary 8-bit PGM with ``rho`` in ``[0, 1)`` mapped linearly to gray."""
    h, w = grid.rho.shape
    gray = np.clip(np.rint(grid.rho * 255.0), 0, 255).astype(np.uint8)
    return f"P5\n{w} {h}\n255\n".encode("ascii") + gray.tobytes(order="C")


def write_pgm(grid: ScanGrid, path) -> None:
    Path(path).write_bytes(pgm_bytes(grid))


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)


def grid_summary(grid: ScanGrid) -> dict:
    h, w = grid.rho.shape
    return {
        **grid.meta,
        "x_range": list(grid.x_range),
        "y_range": list(grid.y_range),
        "width": w,
        "height": h,
        "cells": w * h,
        "confirmed_fraction": float(grid.confirmed.mean()),
    }


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_grid_json(grid: ScanGrid, path) -> None:
    write_json({**grid_summary(grid), "cells_data": [dict(zip(("x", "y", "rho", "err", "p", "q"), r)) for r in grid.rows()]}, path)


def sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".meta.json")
