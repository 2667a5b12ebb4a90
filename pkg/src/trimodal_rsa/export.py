"""CSV tables, run metadata and a minimal SVG heatmap."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt(value) -> str:
    """17 significant digits for reals, empty cell for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ""
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_json(path, doc) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def diverging_color(v: float, vmin: float = -1.0, vmax: float = 1.0) -> str:
    """Blue (vmin) -> white (midpoint) -> red (vmax), linear in RGB; grey for missing."""
    if v is None or not math.isfinite(v):
        return "#bdbdbd"
    mid = 0.5 * (vmin + vmax)
    half = max(0.5 * (vmax - vmin), 1e-300)
    t = max(-1.0, min(1.0, (v - mid) / half))
    if t >= 0:
        r, g, b = 255, round(255 * (1 - t)), round(255 * (1 - t))
    else:
        r, g, b = round(255 * (1 + t)), round(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(path, grid, row_labels, col_labels, title: str = "", vmin=-1.0, vmax=1.0, cell=18) -> Path:
    grid = np.asarray(grid, dtype=np.float64)
    left, top = 70, 40 if title else 24
    width = left + cell * grid.shape[1] + 10
    height = top + cell * grid.shape[0] + 10
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">']
    if title:
        out.append(f'<text x="{left}" y="14">{title}</text>')
    for j, lab in enumerate(col_labels):
        out.append(f'<text x="{left + j * cell + cell / 2}" y="{top - 4}" text-anchor="middle">{lab}</text>')
    for i, lab in enumerate(row_labels):
        y = top + i * cell
        out.append(f'<text x="{left - 4}" y="{y + cell * 0.7}" text-anchor="end">{lab}</text>')
        for j in range(grid.shape[1]):
            v = grid[i, j]
            out.append(
                f'<rect x="{left + j * cell}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{diverging_color(v, vmin, vmax)}"><title>{lab}/{col_labels[j]}: {fmt(v)}</title></rect>'
            )
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
