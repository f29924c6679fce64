"""Grid evaluation of Resp(x_a) and Rsnble over human/system sensitivities and observed values.

Cells are ordered by ``e`` (outer), then ``d_system`` (rows), then
``d_human`` (columns). Axis coordinates are rounded to 10 decimals so the
same nominal point is the same float in grids of different resolution.

Heatmap colors come from a fixed five-stop ramp, linearly interpolated in
RGB over values clipped to [0, 1]::

    0.00 #440154   0.25 #3b528b   0.50 #21918c   0.75 #5ec962   1.00 #fde725
"""

from __future__ import annotations

import csv
import math
import xml.etree.ElementTree as ET
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ResponsibilityError
from .responsibility import ACCEPT, REJECT, analyze_event
from .sdt_model import SIGNAL, Scenario, reference_scenario

DEFAULT_RANGE = (0.6, 3.0, 61)
# -1.5, 0 and 1.5 are the slices of interest; 3.0 and 4.5 continue the same
# spacing to cover observed values up to 4.5.
DEFAULT_E_VALUES = (-1.5, 0.0, 1.5, 3.0, 4.5)
CSV_HEADER = ("e", "d_human", "d_system", "resp_xa", "rsnble_accept", "rsnble_reject")
METRICS = ("resp_xa", "rsnble_accept", "rsnble_reject")

COLOR_RAMP = (
    (0.00, (0x44, 0x01, 0x54)),
    (0.25, (0x3B, 0x52, 0x8B)),
    (0.50, (0x21, 0x91, 0x8C)),
    (0.75, (0x5E, 0xC9, 0x62)),
    (1.00, (0xFD, 0xE7, 0x25)),
)
TICK_STEP = 0.6


def axis_values(lo: float, hi: float, steps: int) -> tuple[float, ...]:
    if steps < 2:
        raise ResponsibilityError(f"a range needs at least 2 steps, got {steps}")
    if not lo < hi:
        raise ResponsibilityError(f"range must be ordered (min < max), got {lo}..{hi}")
    width = (hi - lo) / (steps - 1)
    return tuple(round(lo + i * width, 10) for i in range(steps))


@dataclass(frozen=True)
class SweepSpec:
    d_human_range: tuple[float, float, int] = DEFAULT_RANGE
    d_system_range: tuple[float, float, int] = DEFAULT_RANGE
    e_values: tuple[float, ...] = DEFAULT_E_VALUES
    system_output: str = SIGNAL
    base: Scenario = field(default_factory=reference_scenario)

    def __post_init__(self):
        for name in ("d_human_range", "d_system_range"):
            lo, hi, steps = getattr(self, name)
            if lo <= 0:
                raise ResponsibilityError(f"{name}: sensitivities must be > 0")
            axis_values(lo, hi, int(steps))
        if not self.e_values:
            raise ResponsibilityError("e_values must not be empty")
        object.__setattr__(self, "e_values", tuple(float(e) for e in self.e_values))

    @property
    def d_human_axis(self) -> tuple[float, ...]:
        lo, hi, steps = self.d_human_range
        return axis_values(lo, hi, int(steps))

    @property
    def d_system_axis(self) -> tuple[float, ...]:
        lo, hi, steps = self.d_system_range
        return axis_values(lo, hi, int(steps))


@dataclass(frozen=True)
class SweepCell:
    e: float
    d_human: float
    d_system: float
    resp_xa: float
    rsnble_accept: float
    rsnble_reject: float


@dataclass(frozen=True)
class SweepGrid:
    e_values: tuple[float, ...]
    d_human_axis: tuple[float, ...]
    d_system_axis: tuple[float, ...]
    cells: tuple[SweepCell, ...]

    def matrix(self, e: float, metric: str = "resp_xa") -> np.ndarray:
        """2-D array of ``metric`` for one ``e`` slice, rows d_system, columns d_human."""
        if metric not in METRICS:
            raise ResponsibilityError(f"unknown metric {metric!r}")
        k = self.e_values.index(e)
        n_h, n_s = len(self.d_human_axis), len(self.d_system_axis)
        block = self.cells[k * n_h * n_s:(k + 1) * n_h * n_s]
        return np.array([getattr(c, metric) for c in block]).reshape(n_s, n_h)

    def slice(self, e: float) -> SweepGrid:
        k = self.e_values.index(e)
        n = len(self.d_human_axis) * len(self.d_system_axis)
        return SweepGrid((e,), self.d_human_axis, self.d_system_axis,
                         self.cells[k * n:(k + 1) * n])


def evaluate_cell(base: Scenario, system_output: str, e: float, d_human: float,
                  d_system: float) -> SweepCell:
    scenario = base.replace(d_prime_human=d_human, d_prime_system=d_system)
    try:
        report = analyze_event(scenario, system_output, e, REJECT)
    except ResponsibilityError as exc:
        raise ResponsibilityError(
            f"cell e={e}, d_human={d_human}, d_system={d_system}: {exc}") from exc
    return SweepCell(e, d_human, d_system, report.resp_xa,
                     report.rsnble_per_action[ACCEPT], report.rsnble_per_action[REJECT])


def sweep(spec: SweepSpec) -> SweepGrid:
    hs, ss = spec.d_human_axis, spec.d_system_axis
    cells = tuple(
        evaluate_cell(spec.base, spec.system_output, e, d_h, d_s)
        for e in spec.e_values for d_s in ss for d_h in hs
    )
    return SweepGrid(spec.e_values, hs, ss, cells)


def write_csv(grid: SweepGrid, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in grid.cells:
            w.writerow([repr(getattr(c, k)) for k in CSV_HEADER])


def read_csv(path) -> SweepGrid:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ResponsibilityError(f"unexpected sweep CSV header {header}")
        cells = tuple(SweepCell(*(float(v) for v in row)) for row in reader if row)
    if not cells:
        raise ResponsibilityError("sweep CSV has no rows")
    e_values = tuple(dict.fromkeys(c.e for c in cells))
    d_s = tuple(dict.fromkeys(c.d_system for c in cells))
    d_h = tuple(dict.fromkeys(c.d_human for c in cells))
    return SweepGrid(e_values, d_h, d_s, cells)


def ramp_color(value: float) -> str:
    v = min(1.0, max(0.0, value)) if math.isfinite(value) else 0.0
    for (x0, c0), (x1, c1) in zip(COLOR_RAMP, COLOR_RAMP[1:]):
        if v <= x1:
            t = (v - x0) / (x1 - x0)
            rgb = (round(a + (b - a) * t) for a, b in zip(c0, c1))
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*COLOR_RAMP[-1][1])


def _ticks(axis: Sequence[float]) -> list[float]:
    lo, hi = axis[0], axis[-1]
    k = math.ceil(lo / TICK_STEP - 1e-9)
    out = []
    while k * TICK_STEP <= hi + 1e-9:
        out.append(round(k * TICK_STEP, 10))
        k += 1
    return out


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def render_svg(grid: SweepGrid, metric: str = "resp_xa", cell_px: int = 8) -> str:
    """One heatmap panel per ``e``; x axis d_human, y axis d_system (increasing upward)."""
    n_h, n_s = len(grid.d_human_axis), len(grid.d_system_axis)
    left, top, right, bottom = 56, 36, 16, 48
    panel_w = left + n_h * cell_px + right
    panel_h = top + n_s * cell_px + bottom
    legend_h = 40
    width, height = panel_w * len(grid.e_values), panel_h + legend_h
    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": str(width), "height": str(height),
        "viewBox": f"0 0 {width} {height}",
        "font-family": "sans-serif", "font-size": "10",
    })
    defs = ET.SubElement(svg, "defs")
    grad = ET.SubElement(defs, "linearGradient", {"id": "ramp"})
    for x, _ in COLOR_RAMP:
        ET.SubElement(grad, "stop", {"offset": f"{x:.2f}", "stop-color": ramp_color(x)})

    def xpos(v, axis, n):
        return (v - axis[0]) / (axis[-1] - axis[0]) * (n - 1) * cell_px + cell_px / 2

    for p, e in enumerate(grid.e_values):
        ox = p * panel_w
        g = ET.SubElement(svg, "g", {"transform": f"translate({ox},0)"})
        title = ET.SubElement(g, "text", {"x": str(left + n_h * cell_px / 2), "y": "20",
                                          "text-anchor": "middle"})
        title.text = f"{metric}, e = {_fmt(e)}"
        values = grid.matrix(e, metric)
        for i in range(n_s):
            y = top + (n_s - 1 - i) * cell_px
            for j in range(n_h):
                ET.SubElement(g, "rect", {
                    "x": str(left + j * cell_px), "y": str(y),
                    "width": str(cell_px), "height": str(cell_px),
                    "fill": ramp_color(float(values[i, j])),
                })
        base_y = top + n_s * cell_px
        for t in _ticks(grid.d_human_axis):
            x = left + xpos(t, grid.d_human_axis, n_h)
            ET.SubElement(g, "line", {"x1": f"{x:.2f}", "y1": str(base_y), "x2": f"{x:.2f}",
                                      "y2": str(base_y + 4), "stroke": "black"})
            lab = ET.SubElement(g, "text", {"x": f"{x:.2f}", "y": str(base_y + 15),
                                            "text-anchor": "middle"})
            lab.text = _fmt(t)
        xl = ET.SubElement(g, "text", {"x": str(left + n_h * cell_px / 2), "y": str(base_y + 32),
                                       "text-anchor": "middle"})
        xl.text = "d' human"
        for t in _ticks(grid.d_system_axis):
            y = top + n_s * cell_px - xpos(t, grid.d_system_axis, n_s)
            ET.SubElement(g, "line", {"x1": str(left - 4), "y1": f"{y:.2f}", "x2": str(left),
                                      "y2": f"{y:.2f}", "stroke": "black"})
            lab = ET.SubElement(g, "text", {"x": str(left - 6), "y": f"{y + 3:.2f}",
                                            "text-anchor": "end"})
            lab.text = _fmt(t)
        yl = ET.SubElement(g, "text", {
            "x": "14", "y": str(top + n_s * cell_px / 2), "text-anchor": "middle",
            "transform": f"rotate(-90 14 {top + n_s * cell_px / 2})"})
        yl.text = "d' system"

    ly = panel_h + 8
    ET.SubElement(svg, "path", {"d": f"M{left} {ly} h200 v12 h-200 z", "fill": "url(#ramp)"})
    for v in (0.0, 0.5, 1.0):
        lab = ET.SubElement(svg, "text", {"x": f"{left + 200 * v:.0f}", "y": str(ly + 26),
                                          "text-anchor": "middle"})
        lab.text = _fmt(v)
    return ET.tostring(svg, encoding="unicode") + "\n"


def emit_grid(grid: SweepGrid, fmt: str, path, metric: str = "resp_xa") -> Path:
    """Write ``grid`` as ``'csv'`` or ``'svg_heatmap'`` to ``path``."""
    if not grid.cells:
        raise ResponsibilityError("empty grid")
    path = Path(path)
    try:
        if fmt == "csv":
            write_csv(grid, path)
        elif fmt == "svg_heatmap":
            path.write_text(render_svg(grid, metric), encoding="utf-8")
        else:
            raise ResponsibilityError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise ResponsibilityError(f"cannot write {path}: {exc.strerror}") from None
    return path
