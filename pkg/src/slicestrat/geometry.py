"""Exact stratification geometry in the (t - s, s) plane.

Coordinates are ``x = t - s`` (stem) and ``y = s`` (filtration).  All lines
have integer slope and intercept, so every membership test is integer
arithmetic; boundary points matter (isomorphism vs. surjection).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .diagnostics import GeometryError
from .families import (Family, extremal_orders, family_difference, order_family,
                       order_family_chain, tau)
from .groups import GroupDescriptor, SubgroupClass
from .reps import VirtualRep, fixed_dim, k_of, max_fixed_dim, total_dim

ON_OR_ABOVE = "on_or_above"
ABOVE = "above"
ON_OR_BELOW = "on_or_below"
BELOW = "below"
SENSES = (ON_OR_ABOVE, ABOVE, ON_OR_BELOW, BELOW)


@dataclass(frozen=True)
class Line:
    """y = slope * x + intercept."""

    slope: int
    intercept: int

    def at(self, x: int) -> int:
        return self.slope * x + self.intercept

    def offset(self, x: int, y: int) -> int:
        """Signed vertical distance of (x, y) from the line (positive = above)."""
        return y - self.at(x)

    def shifted(self, r: int) -> "Line":
        return Line(self.slope, self.intercept + r)

    def __str__(self) -> str:
        if self.slope == 0:
            return f"y={self.intercept}"
        s = "x" if self.slope == 1 else f"{self.slope}x"
        if self.intercept == 0:
            return f"y={s}"
        sign = "+" if self.intercept > 0 else "-"
        return f"y={s}{sign}{abs(self.intercept)}"


def _holds(line: Line, sense: str, x: int, y: int) -> bool:
    d = line.offset(x, y)
    return {ON_OR_ABOVE: d >= 0, ABOVE: d > 0, ON_OR_BELOW: d <= 0, BELOW: d < 0}[sense]


@dataclass(frozen=True)
class Piece:
    x_min: Optional[int]  # None = unbounded
    x_max: Optional[int]
    constraints: tuple[tuple[Line, str], ...]

    def covers(self, x: int) -> bool:
        return (self.x_min is None or x >= self.x_min) and (self.x_max is None or x <= self.x_max)


@dataclass(frozen=True)
class Region:
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        ps = sorted(self.pieces, key=lambda p: -10**18 if p.x_min is None else p.x_min)
        for a, b in zip(ps, ps[1:]):
            if a.x_max is None or b.x_min is None or a.x_max >= b.x_min:
                raise GeometryError("region pieces have overlapping x ranges")
        for p in ps:
            for _, sense in p.constraints:
                if sense not in SENSES:
                    raise GeometryError(f"unknown constraint sense {sense!r}")
        object.__setattr__(self, "pieces", tuple(ps))

    def piece_at(self, x: int) -> Optional[Piece]:
        for p in self.pieces:
            if p.covers(x):
                return p
        return None

    def lower_boundary(self, x: int) -> Optional[Line]:
        """The ``on_or_above`` line governing column x, if any."""
        p = self.piece_at(x)
        if p is None:
            return None
        for line, sense in p.constraints:
            if sense in (ON_OR_ABOVE, ABOVE):
                return line
        return None

    def restrict(self, x_min=None, x_max=None) -> "Region":
        out = []
        for p in self.pieces:
            lo = p.x_min if x_min is None else (x_min if p.x_min is None else max(p.x_min, x_min))
            hi = p.x_max if x_max is None else (x_max if p.x_max is None else min(p.x_max, x_max))
            if lo is not None and hi is not None and lo > hi:
                continue
            out.append(Piece(lo, hi, p.constraints))
        return Region(tuple(out))


def contains(R: Region, x: int, y: int) -> bool:
    p = R.piece_at(x)
    return p is not None and all(_holds(l, s, x, y) for l, s in p.constraints)


def offset(boundary, x: int, y: int) -> Optional[int]:
    """Vertical offset from a Line, or from a Region's lower boundary at column x."""
    if isinstance(boundary, Line):
        return boundary.offset(x, y)
    line = boundary.lower_boundary(x)
    return None if line is None else line.offset(x, y)


@dataclass(frozen=True)
class Bidegree:
    x: int  # t - s
    y: int  # s
    V: Optional[VirtualRep] = None

    @property
    def t(self) -> int:
        return self.x + self.y


def line_LHV(H: SubgroupClass, V: VirtualRep) -> Line:
    """Slope |H|-1 line through the isomorphism/surjection boundary for H."""
    return Line(H.order - 1, fixed_dim(V, H.id) * H.order - total_dim(V))


def line_Lh(G: GroupDescriptor, h: int, V: VirtualRep) -> Line:
    if h < 1:
        raise GeometryError(f"h={h} must be at least 1")
    F = order_family(G, min(h, G.order))
    return Line(h - 1, tau(V, F.classes()))


def comparison_region(F: Family, F2: Family, V: VirtualRep) -> Region:
    diff = family_difference(F, F2)
    if not diff:
        raise GeometryError("families are equal; the comparison region is undefined")
    h_min, h_max = extremal_orders(diff)
    t = tau(V, diff)
    return Region((
        Piece(None, -1, ((Line(h_min - 1, t), ON_OR_ABOVE),)),
        Piece(0, None, ((Line(h_max - 1, t), ON_OR_ABOVE),)),
    ))


def recovery_region(G: GroupDescriptor, h: int, V: VirtualRep) -> Region:
    line = line_Lh(G, h, V)
    return Region((
        Piece(None, -1, ((Line(0, line.intercept), ON_OR_ABOVE),)),
        Piece(0, None, ((line, ON_OR_ABOVE),)),
    ))


def cone_lines(G: GroupDescriptor, V: VirtualRep) -> tuple[Line, Line]:
    """(bottom, top) lines of the positive cone."""
    n = total_dim(V)
    bottom = Line(0, -n - k_of(V) * G.order)
    top = Line(G.order - 1, -n + G.order * max_fixed_dim(V))
    return bottom, top


def positive_cone(G: GroupDescriptor, V: VirtualRep) -> Region:
    """Where classes of a connective spectrum can live on the V-graded page."""
    bottom, top = cone_lines(G, V)
    return Region((Piece(None, None, ((bottom, ON_OR_ABOVE), (top, ON_OR_BELOW))),))


def vanishing_bounds(G: GroupDescriptor, V: VirtualRep, column: int) -> tuple[int, int]:
    """Filtration bounds (y_min, y_max) for column x = t - s; y_min > y_max means empty."""
    bottom, top = cone_lines(G, V)
    return bottom.at(column), top.at(column)


ISO, SURJECTION, NO_CLAIM = "iso", "surjection", "no_claim"


def e2_iso_exact(H: SubgroupClass, V: VirtualRep, t: int, s: int) -> str:
    """Exact E2 comparison verdict at (V + t - s, s) for a one-class family difference."""
    n = total_dim(V) + t
    bound = fixed_dim(V, H.id) + t - (-(-n // H.order))  # ceil(n / |H|)
    if s > bound:
        return ISO
    if s == bound:
        return SURJECTION
    return NO_CLAIM


def strata(G: GroupDescriptor, V: VirtualRep) -> list[tuple[int, Line]]:
    return [(h, line_Lh(G, h, V)) for h, _ in order_family_chain(G) if h >= 1]
