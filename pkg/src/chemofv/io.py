"""File writers: time-series CSV, legacy VTK snapshots, SVG line plots."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .diagnostics import COLUMNS, TimeSeries
from .mesh import Mesh, cell_vertices


def _num(x: float) -> str:
    return f"{x:.16e}"


def write_series_csv(series: TimeSeries, path) -> None:
    lines = [",".join(COLUMNS)]
    for row in series.rows:
        lines.append(",".join([_num(v) for v in row[:-1]] + [str(row[-1])]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_series_csv(path) -> TimeSeries:
    text = Path(path).read_text().splitlines()
    if tuple(text[0].split(",")) != COLUMNS:
        raise ValueError(f"unexpected header in {path}: {text[0]!r}")
    series = TimeSeries()
    for line in text[1:]:
        if line.strip():
            parts = line.split(",")
            series.rows.append(tuple(float(p) for p in parts[:-1]) + (int(parts[-1]),))
    return series


_VTK_TYPE = {1: 3, 2: 8, 3: 11}   # VTK_LINE, VTK_PIXEL, VTK_VOXEL


def write_vtk(mesh: Mesh, path, cell_data: dict | None = None, title: str = "chemofv") -> None:
    """Legacy ASCII unstructured grid; cell data as SCALARS blocks."""
    points, conn = cell_vertices(mesh)
    pts3 = np.zeros((len(points), 3))
    pts3[:, :mesh.dim] = points
    nv = conn.shape[1]
    out = ["# vtk DataFile Version 3.0", title.replace("\n", " ")[:255], "ASCII",
           "DATASET UNSTRUCTURED_GRID", f"POINTS {len(pts3)} double"]
    out += [" ".join(_num(x) for x in p) for p in pts3]
    out.append(f"CELLS {mesh.n_cells} {mesh.n_cells * (nv + 1)}")
    out += [f"{nv} " + " ".join(map(str, c)) for c in conn]
    out.append(f"CELL_TYPES {mesh.n_cells}")
    out += [str(_VTK_TYPE[mesh.dim])] * mesh.n_cells
    if cell_data:
        out.append(f"CELL_DATA {mesh.n_cells}")
        for name, values in cell_data.items():
            values = np.asarray(values, dtype=float)
            if values.shape != (mesh.n_cells,):
                raise ValueError(f"cell data {name!r} has wrong length")
            out += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
            out += [_num(v) for v in values]
    Path(path).write_text("\n".join(out) + "\n")


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
           "#7f7f7f", "#bcbd22", "#17becf")


def svg_line_plot(curves, title: str = "", xlabel: str = "t", ylabel: str = "max u",
                  logy: bool = True, width: int = 640, height: int = 420) -> str:
    """Self-contained SVG with axes, ticks and a legend.

    ``curves`` is a sequence of ``(label, x, y)``; nonpositive y values are
    dropped on a log axis.
    """
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom
    cleaned = []
    for label, x, y in curves:
        x, y = np.asarray(x, float), np.asarray(y, float)
        keep = np.isfinite(x) & np.isfinite(y) & ((y > 0) if logy else True)
        cleaned.append((label, x[keep], y[keep]))
    xs = np.concatenate([c[1] for c in cleaned]) if cleaned else np.array([0.0, 1.0])
    ys = np.concatenate([c[2] for c in cleaned]) if cleaned else np.array([1.0, 10.0])
    if len(xs) == 0:
        xs, ys = np.array([0.0, 1.0]), np.array([1.0, 10.0])
    x0, x1 = float(xs.min()), float(xs.max())
    if x1 <= x0:
        x1 = x0 + 1.0
    if logy:
        y0 = math.floor(math.log10(ys.min()))
        y1 = math.ceil(math.log10(ys.max()))
        if y1 <= y0:
            y1 = y0 + 1
        ty = lambda v: top + ph * (1 - (math.log10(v) - y0) / (y1 - y0))  # noqa: E731
        yticks = [(10.0 ** e, f"1e{e}") for e in range(y0, y1 + 1)]
    else:
        y0, y1 = float(ys.min()), float(ys.max())
        if y1 <= y0:
            y1 = y0 + 1.0
        ty = lambda v: top + ph * (1 - (v - y0) / (y1 - y0))  # noqa: E731
        yticks = [(v, f"{v:.3g}") for v in np.linspace(y0, y1, 5)]
    tx = lambda v: left + pw * (v - x0) / (x1 - x0)  # noqa: E731

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">'
             f'{escape(title)}</text>',
             f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for v, label in yticks:
        y = ty(v)
        parts.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" '
                     f'stroke="#dddddd"/>')
        parts.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{label}</text>')
    for v in np.linspace(x0, x1, 5):
        x = tx(v)
        parts.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{v:.3g}</text>')
    parts.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">'
                 f'{escape(xlabel)}</text>')
    parts.append(f'<text x="15" y="{top + ph / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 15 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (label, x, y) in enumerate(cleaned):
        color = _COLORS[i % len(_COLORS)]
        if len(x):
            pts = " ".join(f"{tx(a):.2f},{ty(b):.2f}" for a, b in zip(x, y))
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                         f'points="{pts}"/>')
        ly = top + 12 + 16 * i
        parts.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{escape(str(label))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
