"""Deterministic SVG rendering of chart pages with line overlays.

Output is a pure function of the RenderSpec: elements are emitted in sorted
order, every coordinate is printed with two decimals, and there is no
timestamp or random id anywhere in the document.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional
from xml.sax.saxutils import escape

from .chart import Chart, Window, page_differentials, run_to_page
from .diagnostics import ChartError
from .geometry import Line

STYLES = {
    "strata": "#b03a2e",
    "cone": "#1f4e79",
    "region": "#7d3c98",
    "line": "#555555",
}


@dataclass(frozen=True)
class RenderSpec:
    chart: Chart
    page: int = 2
    overlay: tuple[tuple[Line, str], ...] = ()
    window: Optional[Window] = None
    scale: int = 40

    def __post_init__(self):
        if self.scale < 1:
            raise ChartError("bad-render-spec", f"scale {self.scale} must be at least 1")
        if self.page < 2:
            raise ChartError("bad-render-spec", f"page {self.page} must be at least 2")
        object.__setattr__(self, "overlay", tuple(self.overlay))


def _f(v) -> str:
    return f"{float(v):.2f}"


def clip_line(L: Line, x0, x1, y0, y1):
    """Segment of y = slope*x + intercept inside [x0,x1] x [y0,y1], or None."""
    lo, hi = Fraction(x0), Fraction(x1)
    if L.slope == 0:
        if not y0 <= L.intercept <= y1:
            return None
    else:
        a = Fraction(y0 - L.intercept, L.slope)
        b = Fraction(y1 - L.intercept, L.slope)
        a, b = min(a, b), max(a, b)
        lo, hi = max(lo, a), min(hi, b)
        if lo > hi:
            return None
    return (lo, L.slope * lo + L.intercept), (hi, L.slope * hi + L.intercept)


def render_svg(rs: RenderSpec) -> str:
    chart = rs.chart
    win = rs.window or chart.window
    pages = run_to_page(chart, rs.page)
    view = pages[-1]
    if view.r != rs.page:
        raise ChartError("page-not-computed", f"page {rs.page} is not available")
    s = rs.scale
    margin = s
    # half-unit padding so cells on the border are fully visible
    X0, X1 = Fraction(2 * win.x_min - 1, 2), Fraction(2 * win.x_max + 1, 2)
    Y0, Y1 = Fraction(2 * win.y_min - 1, 2), Fraction(2 * win.y_max + 1, 2)
    width = (X1 - X0) * s + 2 * margin
    height = (Y1 - Y0) * s + 2 * margin

    def px(x):
        return margin + (Fraction(x) - X0) * s

    def py(y):
        return margin + (Y1 - Fraction(y)) * s

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#ffffff"/>',
        '<g id="grid" stroke="#e5e5e5" stroke-width="1">',
    ]
    for x in range(win.x_min, win.x_max + 1):
        out.append(f'<line x1="{_f(px(x))}" y1="{_f(py(Y0))}" x2="{_f(px(x))}" y2="{_f(py(Y1))}"/>')
    for y in range(win.y_min, win.y_max + 1):
        out.append(f'<line x1="{_f(px(X0))}" y1="{_f(py(y))}" x2="{_f(px(X1))}" y2="{_f(py(y))}"/>')
    out.append("</g>")
    out.append('<g id="axes" stroke="#000000" stroke-width="1.5">')
    if win.y_min <= 0 <= win.y_max:
        out.append(f'<line x1="{_f(px(X0))}" y1="{_f(py(0))}" x2="{_f(px(X1))}" y2="{_f(py(0))}"/>')
    if win.x_min <= 0 <= win.x_max:
        out.append(f'<line x1="{_f(px(0))}" y1="{_f(py(Y0))}" x2="{_f(px(0))}" y2="{_f(py(Y1))}"/>')
    out.append("</g>")

    out.append('<g id="overlay" fill="none" stroke-width="2">')
    for L, style in sorted(rs.overlay, key=lambda p: (p[0].slope, p[0].intercept, p[1])):
        seg = clip_line(L, X0, X1, Y0, Y1)
        if seg is None:
            continue
        (ax, ay), (bx, by) = seg
        color = STYLES.get(style, STYLES["line"])
        out.append(f'<line class="{escape(style)}" x1="{_f(px(ax))}" y1="{_f(py(ay))}" '
                   f'x2="{_f(px(bx))}" y2="{_f(py(by))}" stroke="{color}"><title>{escape(str(L))}</title></line>')
    out.append("</g>")

    levels = sorted({c[2] for c in chart.cells})
    lev_off = {lev: Fraction(2 * i - (len(levels) - 1), 2 * max(len(levels), 1) + 2)
               for i, lev in enumerate(levels)}
    radius = Fraction(s, 10)

    def visible(c):
        return (c[0], c[1]) in win

    out.append('<g id="differentials" stroke="#333333" stroke-width="1.2" fill="none">')
    arrows = []
    for src, (tgt, M) in page_differentials(chart, rs.page).items():
        if src not in view.cells or not visible(src):
            continue
        ps = view.cells[src]
        if ps.is_zero():
            continue
        if chart.in_window(tgt) and tgt in view.cells:
            pt = view.cells[tgt]
            if ps.Z.image(M, pt.Z.dim) <= pt.B:
                continue
        arrows.append((src, tgt))
    for src, tgt in sorted(arrows):
        ax, ay = px(src[0] + lev_off[src[2]]), py(src[1])
        bx, by = px(tgt[0] + lev_off.get(tgt[2], 0)), py(tgt[1])
        dash = "" if visible(tgt) else ' stroke-dasharray="4 3"'
        out.append(f'<path d="M {_f(ax)} {_f(ay)} L {_f(bx)} {_f(by)}"{dash}/>')
        # a small dot marks the head
        out.append(f'<circle cx="{_f(bx)}" cy="{_f(by)}" r="{_f(radius / 2)}" fill="#333333"/>')
    out.append("</g>")

    out.append('<g id="cells">')
    for c, p in sorted(view.cells.items()):
        if not visible(c) or p.is_zero():
            continue
        g = p.group()
        free, tors = g.canonical()
        cx, cy = px(c[0] + lev_off[c[2]]), py(c[1])
        label = f"{c[2]}: {g}"
        if p.indeterminate:
            label += " (indeterminate)"
        n = free + len(tors)
        for i in range(n):
            ox = cx + (2 * i - (n - 1)) * radius * Fraction(6, 5)
            if i < free:
                shape = f'<circle cx="{_f(ox)}" cy="{_f(cy)}" r="{_f(radius)}" fill="#000000"/>'
            else:
                t = tors[i - free]
                shape = (f'<circle cx="{_f(ox)}" cy="{_f(cy)}" r="{_f(radius)}" fill="#ffffff" '
                         f'stroke="#000000" stroke-width="{_f(min(t, 9) / 3)}"/>')
            out.append(shape)
        stroke = ' stroke="#d35400" stroke-dasharray="2 2"' if p.indeterminate else ""
        out.append(f'<rect x="{_f(cx - s / 2 + 2)}" y="{_f(cy - s / 4)}" width="{_f(s - 4)}" '
                   f'height="{_f(Fraction(s, 2))}" fill="none"{stroke}><title>{escape(label)}</title></rect>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
