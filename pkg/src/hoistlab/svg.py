"""Time-way diagram rendering (tanks on the vertical axis, time on the horizontal)."""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

from .core import Instance
from .schedule import EmptyTravel, Move, Trajectory, Wait

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")

CSS = (
    ".tank{stroke:#bbbbbb;stroke-width:1}"
    ".bound{stroke:#555555;stroke-width:1;stroke-dasharray:4 3}"
    ".move{stroke-width:2.5}"
    ".travel{stroke:#333333;stroke-width:1.2;stroke-dasharray:6 4}"
    ".wait{stroke:#333333;stroke-width:1.2;stroke-dasharray:1 3}"
    ".soak{stroke-width:6;stroke-opacity:0.35}"
    "text{font-family:sans-serif;font-size:12px}"
)


@dataclass(frozen=True)
class SvgStyle:
    width: int = 1400
    height: int = 600
    margin_left: int = 60
    margin_right: int = 30
    margin_top: int = 30
    margin_bottom: int = 50
    palette: tuple[str, ...] = PALETTE
    title: str | None = None


def _num(x: float) -> str:
    text = f"{round(x, 3):.3f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


class _Frame:
    def __init__(self, inst: Instance, cycle: int, style: SvgStyle):
        self.inst = inst
        self.style = style
        self.cycle = max(cycle, 1)
        # a converted instance draws its extra unload tank on the load station row
        shared = inst.merged_unload or inst.associated_geometry
        self.rows = inst.num_tanks + (1 if shared else 2)

    def row(self, tank: int) -> int:
        if self.inst.merged_unload and tank == self.inst.num_tanks + 1:
            return 0
        return tank

    def x(self, time: float) -> str:
        s = self.style
        width = s.width - s.margin_left - s.margin_right
        return _num(s.margin_left + width * time / self.cycle)

    def y(self, tank: int) -> str:
        s = self.style
        height = s.height - s.margin_top - s.margin_bottom
        step = height / max(self.rows - 1, 1)
        return _num(s.height - s.margin_bottom - step * self.row(tank))


def _line(x1: str, y1: str, x2: str, y2: str, cls: str, color: str | None = None) -> str:
    stroke = f' stroke="{color}"' if color else ""
    return f'<line class="{cls}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"{stroke}/>'


def render_timeway_svg(inst: Instance, trajectory: Trajectory, style: SvgStyle | None = None) -> str:
    """Deterministic SVG of one cycle: moves and soaks are colored by carrier."""
    style = style or SvgStyle()
    C = trajectory.cycle_time
    f = _Frame(inst, C, style)
    moves = {m.op: m for m in trajectory.moves()}
    n = inst.num_ops

    # carrier k moved by move i entered the line k cycles ago
    carrier = {0: 0}
    for i in range(1, n + 1):
        if i in moves and i - 1 in moves:
            wrap = moves[i].start < moves[i - 1].end
            carrier[i] = carrier[i - 1] + (1 if wrap else 0)

    def color(k: int) -> str:
        return style.palette[k % len(style.palette)]

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{style.width}" '
        f'height="{style.height}" viewBox="0 0 {style.width} {style.height}">',
        f"<style>{CSS}</style>",
    ]
    if style.title:
        out.append(f'<text x="{style.margin_left}" y="18">{escape(style.title)}</text>')
    out.append('<g id="axes">')
    for tank in range(f.rows):
        y = f.y(tank)
        out.append(_line(f.x(0), y, f.x(C), y, "tank"))
        out.append(f'<text x="{_num(style.margin_left - 25)}" y="{y}">{tank}</text>')
    top, bottom = f.y(f.rows - 1), f.y(0)
    for time in (0, C):
        out.append(_line(f.x(time), top, f.x(time), bottom, "bound"))
        out.append(f'<text x="{f.x(time)}" y="{_num(style.height - style.margin_bottom + 20)}">{time}</text>')
    out.append("</g>")

    out.append('<g id="soak">')
    for i in range(1, n + 1):
        if i not in moves or i - 1 not in moves:
            continue
        begin, end = moves[i - 1].end, moves[i].start
        y = f.y(inst.tank_of[i])
        if end >= begin:
            out.append(_line(f.x(begin), y, f.x(end), y, "soak", color(carrier[i - 1])))
        else:
            out.append(_line(f.x(begin), y, f.x(C), y, "soak", color(carrier[i - 1])))
            out.append(_line(f.x(0), y, f.x(end), y, "soak", color(carrier[i])))
    out.append("</g>")

    out.append('<g id="hoist">')
    for seg in trajectory.segments:
        if isinstance(seg, Move):
            out.append(
                _line(f.x(seg.start), f.y(seg.src), f.x(seg.end), f.y(seg.dst), "move", color(carrier.get(seg.op, 0)))
            )
        elif isinstance(seg, EmptyTravel):
            out.append(_line(f.x(seg.start), f.y(seg.src), f.x(seg.end), f.y(seg.dst), "travel"))
        elif isinstance(seg, Wait):
            y = f.y(seg.tank)
            out.append(_line(f.x(seg.start), y, f.x(seg.end), y, "wait"))
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
