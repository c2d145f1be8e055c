"""Deterministic SVG heatmaps of transfer matrices.

Values map linearly onto a symmetric diverging scale (default [-1.5, 1.5])
through a three-anchor colormap, blue at the negative end, white at zero,
red at the positive end; out-of-scale values clip to the endpoints. Rows
are targets, columns donors, labelled with language codes. Cells of
invalid rows are hatched. Output is a pure function of (matrix, spec):
identical inputs yield identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CltmError
from .transfer import Cltm

_DEF_NEGATIVE = "#2166AC"
_DEF_ZERO = "#FFFFFF"
_DEF_POSITIVE = "#B2182B"


@dataclass
class HeatmapSpec:
    scale_min: float = -1.5
    scale_max: float = 1.5
    negative_color: str = _DEF_NEGATIVE
    zero_color: str = _DEF_ZERO
    positive_color: str = _DEF_POSITIVE
    cell_size: int = 28
    label_font_size: int = 11
    annotate: bool = False

    def __post_init__(self):
        if self.scale_max <= self.scale_min:
            raise ValueError("scale_max must exceed scale_min")
        if self.cell_size <= 0 or self.label_font_size <= 0:
            raise ValueError("sizes must be positive")


def _parse_hex(color: str) -> tuple[int, int, int]:
    token = color.lstrip("#")
    if len(token) != 6:
        raise ValueError(f"expected #RRGGBB color, got {color!r}")
    return tuple(int(token[i:i + 2], 16) for i in (0, 2, 4))


def _blend(low: tuple[int, int, int], high: tuple[int, int, int], frac: float) -> str:
    channels = [round(lo + (hi - lo) * frac) for lo, hi in zip(low, high)]
    return "#{:02X}{:02X}{:02X}".format(*channels)


def value_color(value: float, spec: HeatmapSpec) -> str:
    """Clip to the scale and interpolate through the diverging anchors."""
    clipped = min(max(value, spec.scale_min), spec.scale_max)
    frac = (clipped - spec.scale_min) / (spec.scale_max - spec.scale_min)
    neg = _parse_hex(spec.negative_color)
    mid = _parse_hex(spec.zero_color)
    pos = _parse_hex(spec.positive_color)
    if frac < 0.5:
        return _blend(neg, mid, frac / 0.5)
    return _blend(mid, pos, (frac - 0.5) / 0.5)


def render_heatmap(cltm: Cltm, spec: HeatmapSpec | None = None) -> bytes:
    """Render the matrix as a standalone SVG document."""
    spec = spec or HeatmapSpec()
    n = cltm.n
    if n == 0 or not cltm.row_valid.any():
        raise CltmError("nothing to render: no valid matrix rows")

    cell = spec.cell_size
    font = spec.label_font_size
    margin_left = 8 + max(len(code) for code in cltm.languages) * (font * 7 // 10)
    margin_top = font + 10
    width = margin_left + n * cell + 8
    height = margin_top + n * cell + 8

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<defs>',
        '<pattern id="invalid" width="6" height="6" patternUnits="userSpaceOnUse" '
        'patternTransform="rotate(45)">',
        '<rect width="6" height="6" fill="#EEEEEE"/>',
        '<line x1="0" y1="0" x2="0" y2="6" stroke="#999999" stroke-width="2"/>',
        '</pattern>',
        '</defs>',
        f'<rect width="{width}" height="{height}" fill="#FFFFFF"/>',
    ]
    for j, code in enumerate(cltm.languages):
        x = margin_left + j * cell + cell // 2
        parts.append(
            f'<text x="{x}" y="{margin_top - 4}" font-size="{font}" '
            f'font-family="monospace" text-anchor="middle">{code}</text>'
        )
    for i, code in enumerate(cltm.languages):
        y = margin_top + i * cell + cell // 2 + font // 2
        parts.append(
            f'<text x="{margin_left - 4}" y="{y}" font-size="{font}" '
            f'font-family="monospace" text-anchor="end">{code}</text>'
        )
    annotate_font = max(7, cell * 3 // 8)
    for i in range(n):
        for j in range(n):
            x = margin_left + j * cell
            y = margin_top + i * cell
            value = float(cltm.entries[i, j])
            if math.isnan(value):
                fill = "url(#invalid)"
                title = f"{cltm.languages[i]}/{cltm.languages[j]}: invalid"
            else:
                fill = value_color(value, spec)
                title = f"{cltm.languages[i]}/{cltm.languages[j]}: {value:.4f}"
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" '
                f'stroke="#CCCCCC" stroke-width="1"><title>{title}</title></rect>'
            )
            if spec.annotate and not math.isnan(value):
                tx = x + cell // 2
                ty = y + cell // 2 + annotate_font // 2
                parts.append(
                    f'<text x="{tx}" y="{ty}" font-size="{annotate_font}" '
                    f'font-family="monospace" text-anchor="middle">{value:.2f}</text>'
                )
    parts.append('</svg>')
    return ("\n".join(parts) + "\n").encode("utf-8")
