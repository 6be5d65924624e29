"""Hand-emitted SVG output for family plots.

No plotting dependency: a fixed 800 x 800 viewport, a linear chart-to-pixel
map, polylines, labelled marks, and dashed level sets extracted with a
small marching-squares pass.  All coordinates are formatted with fixed
precision so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

VIEWPORT = 800
MARGIN = 40

#: declared upper bound, in pixels, for polyline chord lengths
STEP_BOUND_PX = 24.0


def _fmt(v: float) -> str:
    return f"{v:.2f}"


@dataclass
class SvgCanvas:
    bounds: tuple[float, float, float, float]  # x0, x1, y0, y1
    elements: list[str] = field(default_factory=list)
    mark_count: int = 0

    def to_pixels(self, z: complex) -> tuple[float, float]:
        x0, x1, y0, y1 = self.bounds
        px = MARGIN + (z.real - x0) / (x1 - x0) * (VIEWPORT - 2 * MARGIN)
        py = VIEWPORT - MARGIN - (z.imag - y0) / (y1 - y0) * (VIEWPORT - 2 * MARGIN)
        return px, py

    def add_comment(self, text: str) -> None:
        self.elements.append(f"<!-- {text} -->")

    def add_mark(self, z: complex | None, label: str, color: str = "#222222") -> None:
        """A labelled dot; ``z=None`` places the infinity indicator in the corner."""
        if z is None:
            px, py = VIEWPORT - MARGIN / 2.0, MARGIN / 2.0
        else:
            px, py = self.to_pixels(z)
        self.elements.append(
            f'<circle class="mark" cx="{_fmt(px)}" cy="{_fmt(py)}" r="4" fill="{color}"/>')
        self.elements.append(
            f'<text class="mark-label" x="{_fmt(px + 7)}" y="{_fmt(py - 7)}" '
            f'font-size="14" fill="{color}">{label}</text>')
        self.mark_count += 1

    def add_polyline(self, points, color: str, css_class: str,
                     dashed: bool = False, width: float = 1.8) -> None:
        pix = [self.to_pixels(complex(z)) for z in points]
        if len(pix) < 2:
            return
        dense: list[tuple[float, float]] = [pix[0]]
        for (ax, ay), (bx, by) in zip(pix[:-1], pix[1:]):
            chord = math.hypot(bx - ax, by - ay)
            pieces = max(1, int(math.ceil(chord / (0.9 * STEP_BOUND_PX))))
            for k in range(1, pieces + 1):
                dense.append((ax + (bx - ax) * k / pieces, ay + (by - ay) * k / pieces))
        body = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in dense)
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.elements.append(
            f'<polyline class="{css_class}" data-step-bound="{STEP_BOUND_PX:g}" '
            f'points="{body}" fill="none" stroke="{color}" stroke-width="{width:g}"{dash}/>')

    def render(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{VIEWPORT}" '
            f'height="{VIEWPORT}" viewBox="0 0 {VIEWPORT} {VIEWPORT}">\n'
            f'<rect width="{VIEWPORT}" height="{VIEWPORT}" fill="white"/>'
        )
        return head + "\n" + "\n".join(self.elements) + "\n</svg>\n"


def level_set_segments(values, xs, ys, level):
    """Marching-squares segments of ``values == level`` on a rectangular grid.

    ``values[iy][ix]`` is sampled at (xs[ix], ys[iy]); returns chart-plane
    segments as pairs of complex numbers.  Cells containing non-finite
    samples are skipped.
    """
    segs = []
    ny = len(ys)
    nx = len(xs)
    for iy in range(ny - 1):
        for ix in range(nx - 1):
            v00 = values[iy][ix]
            v10 = values[iy][ix + 1]
            v01 = values[iy + 1][ix]
            v11 = values[iy + 1][ix + 1]
            if not all(math.isfinite(v) for v in (v00, v10, v01, v11)):
                continue
            corners = [
                (v00, complex(xs[ix], ys[iy])),
                (v10, complex(xs[ix + 1], ys[iy])),
                (v11, complex(xs[ix + 1], ys[iy + 1])),
                (v01, complex(xs[ix], ys[iy + 1])),
            ]
            crossings = []
            for k in range(4):
                va, za = corners[k]
                vb, zb = corners[(k + 1) % 4]
                if (va - level) * (vb - level) < 0.0:
                    t = (level - va) / (vb - va)
                    crossings.append(za + t * (zb - za))
            if len(crossings) == 2:
                segs.append((crossings[0], crossings[1]))
            elif len(crossings) == 4:
                # saddle cell: connect in sampling order, deterministic
                segs.append((crossings[0], crossings[1]))
                segs.append((crossings[2], crossings[3]))
    return segs


def add_level_sets(canvas: SvgCanvas, values, xs, ys, levels, color: str = "#8888bb") -> None:
    for level in levels:
        segs = level_set_segments(values, xs, ys, level)
        if not segs:
            continue
        parts = []
        for za, zb in segs:
            ax, ay = canvas.to_pixels(za)
            bx, by = canvas.to_pixels(zb)
            parts.append(f"M {_fmt(ax)} {_fmt(ay)} L {_fmt(bx)} {_fmt(by)}")
        canvas.elements.append(
            f'<path class="levelset" d="{" ".join(parts)}" fill="none" '
            f'stroke="{color}" stroke-width="0.8" stroke-dasharray="4,4"/>')
