"""Windowed spectral sequence charts and the integer page-turning engine.

Every cell carries E2 generators; the E_r term at a cell is kept as a pair of
lattices ``B_r <= Z_r`` inside Z^n (n = number of E2 generators), so every
page is an honest subquotient of E2 and maps between pages act on the same
coordinates as the E2 matrices.  Homology is read off by Smith normal form.

A differential matrix has one column per source generator and one row per
target generator.  Entries may be rationals as long as the matrix is integral
on the surviving cycles; this is what lets a d_r act on a class like 2a whose
half does not survive.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from sympy import factorint

from .diagnostics import ChartError, Diagnostic
from .geometry import contains, positive_cone
from .groups import GroupDescriptor
from .lattice import Lattice, NonIntegralError, Quotient, mat_mul, quotient
from .reps import VirtualRep

Cell = tuple  # (x, y, level)


def _num(a):
    if isinstance(a, Fraction):
        return a.numerator if a.denominator == 1 else a
    return int(a)


def as_matrix(rows: Iterable[Iterable]) -> tuple[tuple, ...]:
    return tuple(tuple(_num(a) for a in row) for row in rows)


@dataclass(frozen=True)
class FgaGroup:
    """Z^free_rank + sum of Z/t, with one label per generator (free ones first)."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"g{i}" for i in range(self.ngens)))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def canonical(self) -> tuple[int, tuple[int, ...]]:
        """(free rank, sorted prime-power torsion); equal iff the groups are isomorphic."""
        pp = []
        for t in self.torsion:
            for p, e in factorint(t).items():
                pp.append(p ** e)
        return self.free_rank, tuple(sorted(pp))

    def __str__(self) -> str:
        return canonical_string(self.canonical())

    @classmethod
    def from_quotient(cls, q: Quotient, labels: Sequence[str] = ()) -> "FgaGroup":
        free = [i for i, o in enumerate(q.orders) if o == 0]
        tors = [i for i, o in enumerate(q.orders) if o]
        order = free + tors
        labs = tuple(labels[i] for i in order) if labels else ()
        return cls(len(free), tuple(q.orders[i] for i in tors), labs)


def canonical_string(canon: tuple[int, tuple[int, ...]]) -> str:
    free, tors = canon
    parts = []
    if free:
        parts.append("Z" if free == 1 else f"Z^{free}")
    parts += [f"Z/{t}" for t in tors]
    return "+".join(parts) if parts else "0"


@dataclass(frozen=True)
class Window:
    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __contains__(self, xy) -> bool:
        x, y = xy[0], xy[1]
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    def default_r_max(self) -> int:
        return self.height + 2


@dataclass(frozen=True)
class Differential:
    r: int
    source: Cell
    target: Cell
    matrix: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "matrix", as_matrix(self.matrix))


def differential(r: int, source: Cell, matrix, level: Optional[str] = None) -> Differential:
    """A d_r with the standard shift (x, y) -> (x - 1, y + r)."""
    x, y, lev = source
    return Differential(r, source, (x - 1, y + r, lev if level is None else level), matrix)


@dataclass(frozen=True)
class LevelMap:
    """Restriction or transfer between two levels of the same bidegree."""

    x: int
    y: int
    kind: str  # "restriction" | "transfer"
    from_level: str
    to_level: str
    matrix: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix))


@dataclass(frozen=True)
class Chart:
    group: GroupDescriptor
    V: VirtualRep
    window: Window
    cells: Mapping[Cell, FgaGroup] = field(default_factory=dict)
    differentials: tuple[Differential, ...] = ()
    level_maps: tuple[LevelMap, ...] = ()
    id: str = "chart"

    def __post_init__(self):
        object.__setattr__(self, "cells", {tuple(k): v for k, v in sorted(self.cells.items())})
        object.__setattr__(self, "differentials", tuple(self.differentials))
        object.__setattr__(self, "level_maps", tuple(self.level_maps))

    def ngens(self, cell: Cell) -> int:
        g = self.cells.get(tuple(cell))
        return 0 if g is None else g.ngens

    def in_window(self, cell: Cell) -> bool:
        return (cell[0], cell[1]) in self.window

    def pages_with_differentials(self) -> list[int]:
        return sorted({d.r for d in self.differentials})

    def with_differentials(self, extra: Iterable[Differential], **kw) -> "Chart":
        return replace(self, differentials=self.differentials + tuple(extra), **kw)

    def without_differentials(self, keep=lambda d: False) -> "Chart":
        return replace(self, differentials=tuple(d for d in self.differentials if keep(d)))


def unit_differential(chart: Chart, r: int, source: Cell, src_gen: int, tgt_gen: int,
                      coefficient: int = 1) -> Differential:
    """Generator-to-generator drawing idiom: one entry ``coefficient`` in an otherwise zero matrix."""
    x, y, lev = source
    target = (x - 1, y + r, lev)
    M = [[0] * chart.ngens(source) for _ in range(chart.ngens(target))]
    if not M:
        raise ChartError("shape-mismatch", f"no target generator at {target}", target)
    M[tgt_gen][src_gen] = coefficient
    return Differential(r, source, target, M)


# ---------------------------------------------------------------- pages


@dataclass(frozen=True)
class CellPage:
    """E_r at one cell as Z_r / B_r inside Z^n."""

    Z: Lattice
    B: Lattice
    indeterminate: bool = False

    @property
    def quotient(self) -> Quotient:
        q = self.__dict__.get("_q")
        if q is None:
            q = quotient(self.Z, self.B)
            object.__setattr__(self, "_q", q)
        return q

    def group(self, labels: Sequence[str] = ()) -> FgaGroup:
        q = self.quotient
        labs = tuple(combo_label(g, labels) for g in q.generators) if labels else ()
        return FgaGroup.from_quotient(q, labs)

    def canonical(self):
        return self.group().canonical()

    def is_zero(self) -> bool:
        return self.Z.rank == self.B.rank and self.Z <= self.B

    @property
    def rank(self) -> int:
        return self.Z.rank - self.B.rank


def combo_label(vec: Sequence[int], labels: Sequence[str]) -> str:
    terms = []
    for c, lab in zip(vec, labels):
        if c == 0:
            continue
        if c == 1:
            terms.append(lab)
        elif c == -1:
            terms.append(f"-{lab}")
        else:
            terms.append(f"{c}{lab}")
    s = "+".join(terms).replace("+-", "-")
    return s or "0"


@dataclass(frozen=True)
class PageView:
    r: int
    cells: Mapping[Cell, CellPage]

    def canonical(self) -> dict:
        return {c: p.canonical() for c, p in self.cells.items()}

    def groups(self, chart: Optional[Chart] = None) -> dict:
        out = {}
        for c, p in self.cells.items():
            labels = chart.cells[c].labels if chart is not None and c in chart.cells else ()
            out[c] = p.group(labels)
        return out

    def nonzero(self) -> dict:
        return {c: p for c, p in self.cells.items() if not p.is_zero()}


def e2_cell(g: FgaGroup) -> CellPage:
    n = g.ngens
    rel = [tuple(t if j == g.free_rank + i else 0 for j in range(n)) for i, t in enumerate(g.torsion)]
    return CellPage(Lattice.full(n), Lattice.span(n, rel))


def e2_view(chart: Chart) -> PageView:
    return PageView(2, {c: e2_cell(g) for c, g in chart.cells.items()})


def page_differentials(chart: Chart, r: int) -> dict[Cell, tuple[Cell, list[list]]]:
    """d_r of ``chart`` keyed by source; matrices with the same ends are summed."""
    out: dict[Cell, tuple[Cell, list[list]]] = {}
    for d in chart.differentials:
        if d.r != r:
            continue
        M = [list(row) for row in d.matrix]
        if d.source in out:
            tgt, acc = out[d.source]
            if tgt != d.target:
                raise ChartError("conflicting-differentials",
                                 f"two d_{r} from {d.source} with different targets", d.source)
            acc = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(acc, M)]
            out[d.source] = (tgt, acc)
        else:
            out[d.source] = (d.target, M)
    return out


def _zero_cell(n: int) -> CellPage:
    return CellPage(Lattice.full(n), Lattice.full(n))


def _cellpage(view: PageView, c: Cell) -> CellPage:
    p = view.cells.get(c)
    return p if p is not None else _zero_cell(0)


def _image(M, L: Lattice, tdim: int, where) -> Lattice:
    try:
        return L.image(M, tdim)
    except NonIntegralError as e:
        raise ChartError("non-integral", f"d at {where} is not integral on surviving cycles",
                         (where, e.vector)) from None


def check_page(chart: Chart, view: PageView) -> None:
    """Raise ChartError if some d_r is not a well-defined differential on E_r."""
    r = view.r
    ds = page_differentials(chart, r)
    for src, (tgt, M) in ds.items():
        if not chart.in_window(tgt) or chart.ngens(tgt) == 0 or chart.ngens(src) == 0:
            continue
        ps, pt = _cellpage(view, src), _cellpage(view, tgt)
        n_t = chart.ngens(tgt)
        imZ = _image(M, ps.Z, n_t, src)
        if not imZ <= pt.Z:
            raise ChartError("dead-target", f"d_{r} from {src} hits classes that no longer survive at {tgt}",
                             (r, src, tgt))
        imB = _image(M, ps.B, n_t, src)
        if not imB <= pt.B:
            code = "dead-source" if ps.is_zero() else "ill-defined"
            raise ChartError(code, f"d_{r} from {src} does not vanish on boundaries", (r, src, tgt))
        nxt = ds.get(tgt)
        if nxt is None or not chart.in_window(nxt[0]) or chart.ngens(nxt[0]) == 0:
            continue
        tgt2, M2 = nxt
        comp = mat_mul(M2, M)
        im2 = _image(comp, ps.Z, chart.ngens(tgt2), src)
        if not im2 <= _cellpage(view, tgt2).B:
            raise ChartError("d-squared", f"d_{r} composed with d_{r} from {src} is nonzero",
                             (r, src, tgt, tgt2))


def turn_page(chart: Chart, view: PageView) -> PageView:
    """E_{r+1} from E_r: cycles of the outgoing d_r modulo images of the incoming one."""
    check_page(chart, view)
    r = view.r
    Z = {c: p.Z for c, p in view.cells.items()}
    B = {c: p.B for c, p in view.cells.items()}
    indet = {c: p.indeterminate for c, p in view.cells.items()}
    for src, (tgt, M) in page_differentials(chart, r).items():
        if src not in view.cells:
            continue
        ps = view.cells[src]
        if not chart.in_window(tgt):
            n_t = len(M)
            if n_t and any(any(v) for v in _image(M, ps.Z, n_t, src).basis):
                indet[src] = True
            elif n_t == 0 and any(any(row) for row in M):
                indet[src] = True
            continue
        if tgt not in view.cells:
            continue
        pt = view.cells[tgt]
        Z[src] = Z[src].preimage(M, pt.B)
        B[tgt] = B[tgt] + ps.Z.image(M, pt.Z.dim)
    return PageView(r + 1, {c: CellPage(Z[c], B[c], indet[c]) for c in view.cells})


def run_to_page(chart: Chart, r_max: Optional[int] = None) -> list[PageView]:
    """Pages E_2 .. E_{r_max}; index i holds E_{i+2}."""
    if r_max is None:
        r_max = chart.window.default_r_max()
    if r_max < 2:
        raise ChartError("bad-page", f"r_max={r_max} must be at least 2")
    pages = [e2_view(chart)]
    while pages[-1].r < r_max:
        pages.append(turn_page(chart, pages[-1]))
    return pages


def validate_chart(c: Chart, r_max: Optional[int] = None) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    w = c.window
    if w.x_min > w.x_max or w.y_min > w.y_max:
        diags.append(Diagnostic("bad-window", f"empty window {w}"))
    if c.V.table.group.name != c.group.name:
        diags.append(Diagnostic("group-mismatch", "V is graded over a different group"))
    for cell, g in c.cells.items():
        if cell[2] not in c.group:
            diags.append(Diagnostic("unknown-level", f"level {cell[2]!r} at {cell}", cell))
        if not c.in_window(cell):
            diags.append(Diagnostic("cell-outside-window", f"{cell} lies outside the window", cell))
        if g.free_rank < 0:
            diags.append(Diagnostic("bad-free-rank", f"negative free rank at {cell}", cell))
        if any(t < 2 for t in g.torsion):
            diags.append(Diagnostic("bad-torsion", f"torsion order below 2 at {cell}", cell))
        if len(g.labels) != g.ngens:
            diags.append(Diagnostic("label-count", f"{len(g.labels)} labels for {g.ngens} generators", cell))
    for d in c.differentials:
        x, y, lev = d.source
        if d.r < 2:
            diags.append(Diagnostic("bad-page", f"differential on page {d.r}", d.source))
        if (d.target[0], d.target[1]) != (x - 1, y + d.r):
            diags.append(Diagnostic("bad-bidegree", f"d_{d.r} from {d.source} to {d.target}", d.source))
        if d.target[2] != lev:
            diags.append(Diagnostic("level-mismatch", f"d_{d.r} changes level at {d.source}", d.source))
        n_s = c.ngens(d.source)
        cols_ok = all(len(row) == n_s for row in d.matrix)
        rows_ok = (len(d.matrix) == c.ngens(d.target)) if c.in_window(d.target) else True
        if not (cols_ok and rows_ok):
            diags.append(Diagnostic("shape-mismatch", f"d_{d.r} matrix shape at {d.source}", d.source))
    for m in c.level_maps:
        ok_kind = m.kind in ("restriction", "transfer")
        n_from, n_to = c.ngens((m.x, m.y, m.from_level)), c.ngens((m.x, m.y, m.to_level))
        shape = len(m.matrix) == n_to and all(len(row) == n_from for row in m.matrix)
        if not ok_kind or not shape or m.from_level not in c.group or m.to_level not in c.group:
            diags.append(Diagnostic("bad-level-map", f"{m.kind} {m.from_level}->{m.to_level} at ({m.x},{m.y})",
                                    (m.x, m.y)))
    if diags:
        return diags
    try:
        run_to_page(c, r_max)
    except ChartError as e:
        diags.append(Diagnostic(e.code, str(e), e.witness))
    return diags


def differential_rank(M, src: CellPage, tgt: CellPage) -> int:
    """Rank of the map E_r(src) -> E_r(tgt) induced by M, after tensoring with Q."""
    im = src.Z.image(M, tgt.Z.dim)
    return (tgt.B + im).rank - tgt.B.rank


def euler_check(c: Chart, r_max: Optional[int] = None) -> list[Diagnostic]:
    """Rank bookkeeping across pages, per cell and per level (alternating in the column)."""
    diags: list[Diagnostic] = []
    pages = run_to_page(c, r_max)
    for prev, nxt in zip(pages, pages[1:]):
        r = prev.r
        lost: dict[Cell, int] = defaultdict(int)
        for src, (tgt, M) in page_differentials(c, r).items():
            if src not in prev.cells or tgt not in prev.cells or not c.in_window(tgt):
                continue
            k = differential_rank(M, prev.cells[src], prev.cells[tgt])
            lost[src] += k
            lost[tgt] += k
        for cell, p in prev.cells.items():
            if nxt.cells[cell].rank != p.rank - lost[cell]:
                diags.append(Diagnostic("rank-mismatch",
                                        f"E_{r + 1}{cell} rank {nxt.cells[cell].rank}, expected {p.rank - lost[cell]}",
                                        (r, cell)))
    for lev in sorted({cell[2] for cell in c.cells}):
        sums = [sum((-1) ** (cell[0] % 2) * p.rank for cell, p in pg.cells.items() if cell[2] == lev)
                for pg in pages]
        if len(set(sums)) > 1:
            diags.append(Diagnostic("euler-mismatch", f"alternating rank sum at level {lev} drifts: {sums}", lev))
    return diags


def cone_warnings(c: Chart) -> list[Diagnostic]:
    """Cells or differential targets outside the positive cone (advisory only)."""
    cone = positive_cone(c.group, c.V)
    out = []
    for cell, g in c.cells.items():
        if not g.is_zero() and not contains(cone, cell[0], cell[1]):
            out.append(Diagnostic("outside-cone", f"cell {cell} lies outside the positive cone", cell))
    for d in c.differentials:
        if c.in_window(d.target) and not contains(cone, d.target[0], d.target[1]):
            out.append(Diagnostic("leaves-cone", f"d_{d.r} from {d.source} lands outside the cone", d.source))
    return out
