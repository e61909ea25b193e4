"""Deterministic SVG writer for ternary boards.

Renders the triangle frame, coordinate gridlines, filled regions, segments,
and labelled points from :mod:`coos.ternary` values. Output is a plain
string with fixed element ordering and fixed-precision coordinates, so
identical input always yields byte-identical SVG.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .ternary import Segment, SimplexRegion, TernaryPoint, embed

DEFAULT_AXIS_LABELS = ("social", "environmental", "economic")


@dataclass(frozen=True)
class BoardPoint:
    point: TernaryPoint
    radius: float = 4.0
    fill: str = "#1f5fa8"
    label: Optional[str] = None


@dataclass(frozen=True)
class BoardSegment:
    segment: Segment
    stroke: str = "#555555"
    width: float = 1.5
    dashed: bool = False


@dataclass(frozen=True)
class BoardRegion:
    region: SimplexRegion
    fill: str = "#b8b8b8"
    opacity: float = 0.45


@dataclass
class TernaryBoard:
    """Everything the writer draws, in draw order within each layer."""

    title: Optional[str] = None
    axis_labels: tuple[str, str, str] = DEFAULT_AXIS_LABELS
    regions: list[BoardRegion] = field(default_factory=list)
    segments: list[BoardSegment] = field(default_factory=list)
    points: list[BoardPoint] = field(default_factory=list)
    grid_step: float = 0.2
    size: int = 640


_MARGIN = 70.0


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class _Viewport:
    def __init__(self, size: int):
        self.scale = (size - 2 * _MARGIN) / (3.0 ** 0.5)
        self.cx = size / 2.0
        self.top_y = _MARGIN
        self.height = 2 * _MARGIN + 1.5 * self.scale

    def to_svg(self, p: TernaryPoint) -> tuple[float, float]:
        x, y = embed(p)
        return (self.cx + x * self.scale, self.top_y + (1.0 - y) * self.scale)


def render_board(board: TernaryBoard) -> str:
    vp = _Viewport(board.size)
    width = board.size
    height = int(round(vp.height)) + (30 if board.title else 0)
    top_offset = 30 if board.title else 0

    def pt(p: TernaryPoint) -> str:
        x, y = vp.to_svg(p)
        return f"{_fmt(x)},{_fmt(y + top_offset)}"

    def xy(p: TernaryPoint) -> tuple[str, str]:
        x, y = vp.to_svg(p)
        return _fmt(x), _fmt(y + top_offset)

    lines: list[str] = []
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    lines.append(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    if board.title:
        lines.append(
            f'<text x="{_fmt(width / 2)}" y="20" font-family="sans-serif" font-size="16" '
            f'text-anchor="middle">{_escape(board.title)}</text>'
        )

    # Gridlines: constant-coordinate lines for each axis at grid_step intervals.
    if board.grid_step and board.grid_step > 0:
        steps = int(round(1.0 / board.grid_step))
        for axis_i in range(3):
            for k in range(1, steps):
                v = k * board.grid_step
                ends = _constant_line_endpoints(axis_i, v)
                if ends is None:
                    continue
                p1, p2 = ends
                lines.append(
                    f'<line x1="{xy(p1)[0]}" y1="{xy(p1)[1]}" x2="{xy(p2)[0]}" y2="{xy(p2)[1]}" '
                    f'stroke="#e0e0e0" stroke-width="0.5"/>'
                )

    frame = (TernaryPoint(1, 0, 0), TernaryPoint(0, 1, 0), TernaryPoint(0, 0, 1))
    lines.append(
        f'<polygon points="{pt(frame[0])} {pt(frame[1])} {pt(frame[2])}" '
        f'fill="none" stroke="#222222" stroke-width="1.5"/>'
    )
    anchors = ("middle", "end", "start")
    offsets = ((0.0, -10.0), (-6.0, 16.0), (6.0, 16.0))
    for i, (label, vertex) in enumerate(zip(board.axis_labels, frame)):
        x, y = vp.to_svg(vertex)
        lines.append(
            f'<text x="{_fmt(x + offsets[i][0])}" y="{_fmt(y + top_offset + offsets[i][1])}" '
            f'font-family="sans-serif" font-size="13" text-anchor="{anchors[i]}">'
            f"{_escape(label)}</text>"
        )

    for reg in board.regions:
        if reg.region.is_empty:
            continue
        pts = " ".join(pt(v) for v in reg.region.vertices)
        lines.append(
            f'<polygon points="{pts}" fill="{reg.fill}" fill-opacity="{reg.opacity}" '
            f'stroke="none"/>'
        )

    for seg in board.segments:
        x1, y1 = xy(seg.segment.start)
        x2, y2 = xy(seg.segment.end)
        dash = ' stroke-dasharray="6,4"' if seg.dashed else ""
        lines.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{seg.stroke}" '
            f'stroke-width="{seg.width}"{dash}/>'
        )

    for bp in board.points:
        px, py = vp.to_svg(bp.point)
        py += top_offset
        lines.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{bp.radius}" fill="{bp.fill}"/>'
        )
        if bp.label:
            lines.append(
                f'<text x="{_fmt(px)}" y="{_fmt(py - bp.radius - 4)}" font-family="sans-serif" '
                f'font-size="11" text-anchor="middle">{_escape(bp.label)}</text>'
            )

    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _constant_line_endpoints(axis_i: int, v: float) -> Optional[tuple[TernaryPoint, TernaryPoint]]:
    """Endpoints of the in-simplex line where coordinate ``axis_i`` equals v."""
    if not (0.0 < v < 1.0):
        return None
    rest = 1.0 - v
    c1 = [0.0, 0.0, 0.0]
    c2 = [0.0, 0.0, 0.0]
    others = [k for k in range(3) if k != axis_i]
    c1[axis_i] = v
    c1[others[0]] = rest
    c2[axis_i] = v
    c2[others[1]] = rest
    return (TernaryPoint(*c1), TernaryPoint(*c2))


def scenario_cloud_board(
    points: Sequence[TernaryPoint],
    title: Optional[str] = None,
    axis_labels: tuple[str, str, str] = DEFAULT_AXIS_LABELS,
) -> TernaryBoard:
    """Board with one small dot per scenario point."""
    return TernaryBoard(
        title=title,
        axis_labels=axis_labels,
        points=[BoardPoint(p, radius=1.6, fill="#2a7f3f") for p in points],
    )
