"""Deterministic SVG and CSV emission."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InputError, IoFailure
from .gersgorin import Box, DiskSet, bounding_box
from .raster import BAND, RasterGrid, extract_contours

Source = Union[DiskSet, RasterGrid, Sequence[complex]]


@dataclass
class Layer:
    source: Source
    stroke: str = "#000000"
    fill: str = "none"
    label: str = ""
    # only used by point layers
    marker_size: float = 6.0


@dataclass
class PlotSpec:
    layers: list[Layer]
    width: int = 640
    height: int = 640
    box: Box | None = None
    band_color: str = "#f4a300"
    title: str = ""

    def __post_init__(self):
        if not self.layers:
            raise InputError("a plot needs at least one layer")
        if self.width < 16 or self.height < 16:
            raise InputError("plot is too small")


def _layer_box(src: Source) -> Box:
    if isinstance(src, DiskSet):
        return bounding_box(src)
    if isinstance(src, RasterGrid):
        return src.box
    pts = np.asarray(src, dtype=complex)
    return (pts.real.min(), pts.real.max(), pts.imag.min(), pts.imag.max())


def _plot_box(spec: PlotSpec) -> Box:
    if spec.box is not None:
        return spec.box
    boxes = [_layer_box(layer.source) for layer in spec.layers]
    xmin = min(b[0] for b in boxes)
    xmax = max(b[1] for b in boxes)
    ymin = min(b[2] for b in boxes)
    ymax = max(b[3] for b in boxes)
    pad = 0.05 * max(xmax - xmin, ymax - ymin, 1e-9)
    return (xmin - pad, xmax + pad, ymin - pad, ymax + pad)


def _nice_step(span: float, target: int = 8) -> float:
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


def _f(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    """World-to-pixel map with equal scaling on both axes, y pointing up."""

    MARGIN = 40

    def __init__(self, box: Box, width: int, height: int):
        self.box = box
        xmin, xmax, ymin, ymax = box
        inner_w = width - 2 * self.MARGIN
        inner_h = height - 2 * self.MARGIN
        self.scale = min(inner_w / (xmax - xmin), inner_h / (ymax - ymin))
        self.ox = self.MARGIN + 0.5 * (inner_w - self.scale * (xmax - xmin))
        self.oy = self.MARGIN + 0.5 * (inner_h - self.scale * (ymax - ymin))

    def px(self, z: complex) -> tuple[float, float]:
        x = self.ox + (z.real - self.box[0]) * self.scale
        y = self.oy + (self.box[3] - z.imag) * self.scale
        return x, y


def _polyline_d(canvas: _Canvas, pts: np.ndarray) -> str:
    coords = [canvas.px(complex(z)) for z in pts]
    closed = len(pts) > 2 and pts[0] == pts[-1]
    if closed:
        coords = coords[:-1]
    d = "M" + " L".join(f"{_f(x)},{_f(y)}" for x, y in coords)
    return d + (" Z" if closed else "")


def _axes(canvas: _Canvas) -> list[str]:
    xmin, xmax, ymin, ymax = canvas.box
    out = ['<g class="axes" stroke="#555555" stroke-width="1" font-size="10" '
           'font-family="sans-serif" fill="#555555">']
    y_axis_at = 0.0 if ymin <= 0 <= ymax else ymin
    x_axis_at = 0.0 if xmin <= 0 <= xmax else xmin
    x0, y0 = canvas.px(complex(xmin, y_axis_at))
    x1, _ = canvas.px(complex(xmax, y_axis_at))
    out.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y0)}"/>')
    ax, ay0 = canvas.px(complex(x_axis_at, ymin))
    _, ay1 = canvas.px(complex(x_axis_at, ymax))
    out.append(f'<line x1="{_f(ax)}" y1="{_f(ay0)}" x2="{_f(ax)}" y2="{_f(ay1)}"/>')
    step = _nice_step(max(xmax - xmin, ymax - ymin))
    for k in range(math.ceil(xmin / step), math.floor(xmax / step) + 1):
        t = k * step
        x, y = canvas.px(complex(t, y_axis_at))
        out.append(f'<line x1="{_f(x)}" y1="{_f(y - 3)}" x2="{_f(x)}" y2="{_f(y + 3)}"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(y + 14)}" text-anchor="middle" '
                   f'stroke="none">{_f(t)}</text>')
    for k in range(math.ceil(ymin / step), math.floor(ymax / step) + 1):
        t = k * step
        x, y = canvas.px(complex(x_axis_at, t))
        out.append(f'<line x1="{_f(x - 3)}" y1="{_f(y)}" x2="{_f(x + 3)}" y2="{_f(y)}"/>')
        out.append(f'<text x="{_f(x - 5)}" y="{_f(y + 3)}" text-anchor="end" '
                   f'stroke="none">{_f(t)}i</text>')
    out.append("</g>")
    return out


def _asterisk(canvas: _Canvas, z: complex, size: float) -> str:
    x, y = canvas.px(z)
    parts = []
    for k in range(3):
        a = math.pi * k / 3 + math.pi / 2
        dx, dy = size * math.cos(a), size * math.sin(a)
        parts.append(f"M{_f(x - dx)},{_f(y - dy)} L{_f(x + dx)},{_f(y + dy)}")
    return " ".join(parts)


def _render_layer(canvas: _Canvas, layer: Layer, band_color: str) -> list[str]:
    src = layer.source
    label = f' data-label="{layer.label}"' if layer.label else ""
    if isinstance(src, DiskSet):
        out = [f'<g class="disks"{label} stroke="{layer.stroke}" fill="{layer.fill}" '
               f'stroke-width="1.2">']
        for d in src.disks:
            x, y = canvas.px(d.center)
            out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(d.radius * canvas.scale)}"/>')
        out.append("</g>")
        return out
    if isinstance(src, RasterGrid):
        out = [f'<g class="region"{label}>']
        band = np.argwhere(src.cells == BAND)
        if len(band):
            dx = (src.box[1] - src.box[0]) / (src.nx - 1) * canvas.scale
            dy = (src.box[3] - src.box[2]) / (src.ny - 1) * canvas.scale
            out.append(f'<g class="band" fill="{band_color}" stroke="none">')
            for p, q in band:
                x, y = canvas.px(src.node(int(p), int(q)))
                out.append(f'<rect x="{_f(x - dx / 2)}" y="{_f(y - dy / 2)}" '
                           f'width="{_f(dx)}" height="{_f(dy)}"/>')
            out.append("</g>")
        for poly in extract_contours(src):
            out.append(f'<path class="contour" d="{_polyline_d(canvas, poly)}" '
                       f'stroke="{layer.stroke}" fill="{layer.fill}" stroke-width="1.5"/>')
        out.append("</g>")
        return out
    out = [f'<g class="points"{label} stroke="{layer.stroke}" stroke-width="1.5">']
    for z in src:
        out.append(f'<path class="marker" d="{_asterisk(canvas, complex(z), layer.marker_size)}"/>')
    out.append("</g>")
    return out


def render_svg(spec: PlotSpec) -> str:
    canvas = _Canvas(_plot_box(spec), spec.width, spec.height)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect class="background" x="0" y="0" width="{spec.width}" height="{spec.height}" '
        'fill="#ffffff"/>',
    ]
    if spec.title:
        lines.append(f'<text x="{spec.width // 2}" y="20" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="13">{spec.title}</text>')
    lines += _axes(canvas)
    for layer in spec.layers:
        lines += _render_layer(canvas, layer, spec.band_color)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _write(path: str | Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def emit_svg(spec: PlotSpec, path: str | Path | None = None) -> str:
    """Render ``spec``; write it to ``path`` when given. Returns the document."""
    text = render_svg(spec)
    if path is not None:
        _write(path, text)
    return text


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


def emit_csv(header: Sequence[str], rows: Iterable[Sequence], path: str | Path | None = None
             ) -> str:
    """CSV with a header row and 9 significant digits for floats."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise InputError(f"row has {len(row)} fields, header has {len(header)}")
        writer.writerow([_cell(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        _write(path, text)
    return text
