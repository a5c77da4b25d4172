"""Maps between charts: isomorphism-on-a-line checks, differential transport, towers.

A ChartMap gives, per cell, an integer matrix from source E2 generators to
target E2 generators.  Because every page is kept as a subquotient of E2 in
the same coordinates, the same matrix induces the map on every page once it
carries cycles to cycles and boundaries to boundaries.

Position relative to a boundary is the signed vertical offset ``delta``.  A
boundary is either a Line or a Region, in which case the lower boundary of
the piece covering the column is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .chart import (Cell, Chart, CellPage, Differential, PageView, as_matrix, e2_cell,
                    page_differentials, run_to_page, turn_page)
from .diagnostics import ChartError, ComparisonError, Diagnostic
from .families import order_family
from .geometry import Line, Region, cone_lines, line_Lh, offset, recovery_region
from .groups import GroupDescriptor, cyclic_parameters
from .lattice import Lattice, NonIntegralError, mat_mul, mat_vec, rational_extension, solve_left
from .reps import VirtualRep

Boundary = Union[Line, Region]


@dataclass(frozen=True)
class ChartMap:
    source: Chart
    target: Chart
    matrices: Mapping[Cell, tuple] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "matrices",
                           {tuple(k): as_matrix(v) for k, v in sorted(self.matrices.items())})

    def matrix(self, cell: Cell) -> list[list]:
        """The matrix at ``cell``; a missing entry is the zero map."""
        cell = tuple(cell)
        M = self.matrices.get(cell)
        if M is not None:
            return [list(r) for r in M]
        return [[0] * self.source.ngens(cell) for _ in range(self.target.ngens(cell))]

    def cells(self) -> list[Cell]:
        return sorted(set(self.source.cells) | set(self.target.cells))


def identity_map(source: Chart, target: Chart) -> ChartMap:
    mats = {}
    for c in set(source.cells) & set(target.cells):
        n, k = target.ngens(c), source.ngens(c)
        mats[c] = [[int(i == j) for j in range(k)] for i in range(n)]
    return ChartMap(source, target, mats)


def compose(second: ChartMap, first: ChartMap) -> ChartMap:
    """second ∘ first, cell by cell."""
    mats = {}
    for c in sorted(set(first.source.cells) | set(second.target.cells)):
        if first.source.ngens(c) and second.target.ngens(c):
            mats[c] = mat_mul(second.matrix(c), first.matrix(c)) if first.target.ngens(c) else \
                [[0] * first.source.ngens(c) for _ in range(second.target.ngens(c))]
    return ChartMap(first.source, second.target, mats)


def validate_map(m: ChartMap) -> list[Diagnostic]:
    diags = []
    if m.source.group.name != m.target.group.name:
        diags.append(Diagnostic("group-mismatch", "source and target live over different groups"))
    if m.source.V != m.target.V:
        diags.append(Diagnostic("V-mismatch", "source and target have different V"))
    for c, M in m.matrices.items():
        n_t, n_s = m.target.ngens(c), m.source.ngens(c)
        if len(M) != n_t or any(len(row) != n_s for row in M):
            diags.append(Diagnostic("shape-mismatch", f"map matrix at {c} should be {n_t}x{n_s}", c))
    return diags


def _require_valid(m: ChartMap):
    diags = validate_map(m)
    if diags:
        raise ComparisonError("mismatched-charts", "; ".join(d.message for d in diags),
                              [d.code for d in diags])


def delta(L: Boundary, cell: Cell) -> Optional[int]:
    return offset(L, cell[0], cell[1])


def _on_or_above(L: Boundary, cell: Cell) -> bool:
    d = delta(L, cell)
    return d is not None and d >= 0


# -------------------------------------------------------------- page maps


def _page(view: PageView, cell: Cell, n: int) -> CellPage:
    p = view.cells.get(cell)
    return p if p is not None else CellPage(Lattice.full(n), Lattice.full(n))


def map_defined(M, ps: CellPage, pt: CellPage) -> bool:
    """Does M carry cycles to cycles and boundaries to boundaries?"""
    return ps.Z.image(M, pt.Z.dim) <= pt.Z and ps.B.image(M, pt.Z.dim) <= pt.B


def map_injective(M, ps: CellPage, pt: CellPage) -> bool:
    return ps.Z.preimage(M, pt.B) <= ps.B


def map_surjective(M, ps: CellPage, pt: CellPage) -> bool:
    return pt.Z <= pt.B + ps.Z.image(M, pt.Z.dim)


def _induced_nonzero(M, ps: CellPage, pt: CellPage) -> bool:
    return not ps.Z.image(M, pt.Z.dim) <= pt.B


def _natural(phi_c, phi_cp, Ms, Mt, ps: CellPage, pt_plus: CellPage) -> bool:
    """phi(c+)·d - d'·phi(c) vanishes on E_r(c), i.e. lands in target boundaries."""
    for z in ps.Z.basis:
        a = mat_vec(phi_cp, mat_vec(Ms, z)) if Ms is not None else (0,) * pt_plus.Z.dim
        b = mat_vec(Mt, mat_vec(phi_c, z)) if Mt is not None else (0,) * pt_plus.Z.dim
        diff = [x - y for x, y in zip(a, b)] if pt_plus.Z.dim else []
        if any(getattr(v, "denominator", 1) != 1 for v in diff):
            return False
        if not pt_plus.B.contains([int(v) for v in diff]):
            return False
    return True


# -------------------------------------------------------------- reports


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    witnesses: tuple = ()

    def to_json(self):
        return {"passed": self.passed, "witnesses": [dict(w) for w in self.witnesses]}


@dataclass(frozen=True)
class IsomReport:
    line: Boundary
    condition1: ConditionResult
    condition2: ConditionResult
    condition3: ConditionResult
    page_range: tuple[int, int]

    @property
    def passed(self) -> bool:
        return self.condition1.passed and self.condition2.passed and self.condition3.passed


def _witness(cell, page, reason):
    return {"x": cell[0], "y": cell[1], "level": cell[2], "page": page, "reason": reason}


def condition1_witnesses(m: ChartMap, L: Boundary) -> list[dict]:
    """E2: isomorphism strictly above L and surjection on L, at every level."""
    out = []
    for c in m.cells():
        d = delta(L, c)
        if d is None or d < 0:
            continue
        n_s, n_t = m.source.ngens(c), m.target.ngens(c)
        ps = e2_cell(m.source.cells[c]) if c in m.source.cells else CellPage(Lattice.full(0), Lattice.full(0))
        pt = e2_cell(m.target.cells[c]) if c in m.target.cells else CellPage(Lattice.full(0), Lattice.full(0))
        M = m.matrix(c)
        if not n_t:
            if d > 0 and n_s and not ps.is_zero():
                out.append(_witness(c, 2, "not-injective"))
            continue
        if not n_s:
            if not pt.is_zero():
                out.append(_witness(c, 2, "not-surjective"))
            continue
        if not map_defined(M, ps, pt):
            out.append(_witness(c, 2, "page-map-undefined"))
            continue
        if not map_surjective(M, ps, pt):
            out.append(_witness(c, 2, "not-surjective"))
        if d > 0 and not map_injective(M, ps, pt):
            out.append(_witness(c, 2, "not-injective"))
    return out


def check_isom_on_line(m: ChartMap, L: Boundary, r_max: Optional[int] = None) -> IsomReport:
    _require_valid(m)
    if r_max is None:
        r_max = max(m.source.window.default_r_max(), m.target.window.default_r_max())
    try:
        spages = run_to_page(m.source, r_max)
        tpages = run_to_page(m.target, r_max)
    except ChartError as e:
        raise ComparisonError("mismatched-charts", f"chart does not page-turn: {e}", e.witness) from None
    c1 = condition1_witnesses(m, L)
    c2, c3 = [], []
    for sv, tv in zip(spages, tpages):
        r = sv.r
        sd = page_differentials(m.source, r)
        td = page_differentials(m.target, r)
        for c in m.cells():
            if not _on_or_above(L, c):
                continue
            cp = (c[0] - 1, c[1] + r, c[2])
            if not (m.source.in_window(cp) and m.target.in_window(cp)):
                continue
            n_s, n_t = m.source.ngens(c), m.target.ngens(c)
            ns_p, nt_p = m.source.ngens(cp), m.target.ngens(cp)
            ps, pt = _page(sv, c, n_s), _page(tv, c, n_t)
            ps_p, pt_p = _page(sv, cp, ns_p), _page(tv, cp, nt_p)
            Ms = sd[c][1] if c in sd else None
            Mt = td[c][1] if c in td else None
            s_nonzero = Ms is not None and ns_p > 0 and _induced_nonzero(Ms, ps, ps_p)
            t_nonzero = Mt is not None and nt_p > 0 and _induced_nonzero(Mt, pt, pt_p)
            if not (s_nonzero or t_nonzero):
                continue
            phi_c, phi_cp = m.matrix(c), m.matrix(cp)
            defined = _safe_defined(phi_c, ps, pt) and _safe_defined(phi_cp, ps_p, pt_p)
            if not defined:
                w = _witness(c, r, "page-map-undefined")
                (c2 if s_nonzero else c3).append(w)
                continue
            natural = _natural(phi_c, phi_cp, Ms, Mt, ps, pt_p)
            if s_nonzero:
                image_nonzero = _induced_nonzero(mat_mul(phi_cp, Ms), ps, pt_p) if nt_p else False
                if not natural:
                    c2.append(_witness(c, r, "not-natural"))
                elif not image_nonzero:
                    c2.append(_witness(c, r, "image-differential-zero"))
            if t_nonzero:
                if not natural:
                    c3.append(_witness(c, r, "not-natural"))
                elif not map_surjective(phi_c, ps, pt):
                    c3.append(_witness(c, r, "not-an-image"))
    return IsomReport(L, ConditionResult(not c1, tuple(c1)), ConditionResult(not c2, tuple(c2)),
                      ConditionResult(not c3, tuple(c3)), (2, r_max))


def _safe_defined(M, ps, pt) -> bool:
    if ps.Z.dim == 0 or pt.Z.dim == 0:
        return True
    try:
        return map_defined(M, ps, pt)
    except NonIntegralError:
        return False


# -------------------------------------------------------------- transport


@dataclass(frozen=True)
class Candidate:
    """A target differential that could not be pulled back uniquely."""

    r: int
    source: Cell
    target: Cell
    reason: str  # non-unique | no-lift | page-map-undefined

    def to_json(self):
        return {"r": self.r, "source": list(self.source), "target": list(self.target),
                "reason": self.reason, "indeterminate": True}


@dataclass(frozen=True)
class Propagation:
    chart: Chart
    installed: tuple[Differential, ...]
    candidates: tuple[Candidate, ...]


def _pullback(phi_c, phi_cp, Mt, ps: CellPage, ps_p: CellPage, pt_p: CellPage):
    """Solve phi(c+)·D = d'·phi(c) on E_r(c).  Returns (matrix | None, reason | None)."""
    q = ps.quotient
    n_t = pt_p.Z.dim
    n_p = ps_p.Z.dim
    # uniqueness: no nonzero map from E_r(c) into ker(phi_r(c+))
    K = ps_p.Z.preimage(phi_cp, pt_p.B)
    for a in set(q.orders):
        torsion = K if a == 0 else K.preimage([[a * int(i == j) for j in range(n_p)] for i in range(n_p)], ps_p.B)
        if not torsion <= ps_p.B:
            return None, "non-unique"
    Zb = ps_p.Z.basis
    phiZ = [mat_vec(phi_cp, z) for z in Zb]
    images = []
    for g, a in zip(q.generators, q.orders):
        v = mat_vec(Mt, mat_vec(phi_c, g))
        if any(getattr(x, "denominator", 1) != 1 for x in v):
            return None, "page-map-undefined"
        v = [int(x) for x in v]
        # rows: (phi z_j, a z_j) | (b_t, 0) | (0, b_s);  solve u·A = (v, 0)
        width = n_t + (n_p if a else 0)
        A = [list(pz) + ([a * x for x in z] if a else []) for pz, z in zip(phiZ, Zb)]
        A += [list(b) + ([0] * n_p if a else []) for b in pt_p.B.basis]
        if a:
            A += [[0] * n_t + list(b) for b in ps_p.B.basis]
        rhs = v + ([0] * n_p if a else [])
        if not A:
            if any(rhs):
                return None, "no-lift"
            images.append((0,) * n_p)
            continue
        u = solve_left(A, width, rhs)
        if u is None:
            return None, "no-lift"
        w = tuple(sum(u[j] * Zb[j][i] for j in range(len(Zb))) for i in range(n_p))
        images.append(w)
    # extend by zero on generators that are already boundaries
    domain = list(q.generators) + list(q.trivial)
    values = images + [(0,) * n_p] * len(q.trivial)
    if all(ps_p.B.contains(w) for w in images):
        return "zero", None
    return rational_extension(domain, values, ps.Z.dim, n_p), None


def propagate_differentials(source_e2: Chart, target: Chart, m: ChartMap, L: Boundary,
                            r_max: Optional[int] = None) -> Propagation:
    """Pull back target differentials originating on or above L into the source chart.

    A pullback is installed when it exists and is unique on the page; otherwise
    the target differential is reported as an indeterminate candidate.  Cells
    that already carry a d_r in the source are left alone.
    """
    if m.source is not source_e2 or m.target is not target:
        m = ChartMap(source_e2, target, m.matrices)
    _require_valid(m)
    w = condition1_witnesses(m, L)
    if w:
        raise ComparisonError("condition1-failed", "E2 map is not iso above / onto on the line", w)
    if r_max is None:
        r_max = max(source_e2.window.default_r_max(), target.window.default_r_max())
    try:
        tpages = run_to_page(target, r_max)
    except ChartError as e:
        raise ComparisonError("mismatched-charts", f"target does not page-turn: {e}", e.witness) from None
    chart = source_e2
    view = run_to_page(chart, 2)[0]
    installed, candidates = [], []
    for tv in tpages:
        r = tv.r
        existing = page_differentials(chart, r)
        new = []
        for c, (cp, Mt) in sorted(page_differentials(target, r).items()):
            if c not in chart.cells or not _on_or_above(L, c):
                continue
            if c in existing or not chart.in_window(cp) or chart.ngens(cp) == 0:
                continue
            ps, ps_p = view.cells[c], view.cells[cp]
            if ps.is_zero():
                continue
            pt, pt_p = _page(tv, c, target.ngens(c)), _page(tv, cp, target.ngens(cp))
            if not _induced_nonzero(Mt, pt, pt_p):
                continue
            phi_c, phi_cp = m.matrix(c), m.matrix(cp)
            if not (_safe_defined(phi_c, ps, pt) and _safe_defined(phi_cp, ps_p, pt_p)):
                candidates.append(Candidate(r, c, cp, "page-map-undefined"))
                continue
            M, reason = _pullback(phi_c, phi_cp, Mt, ps, ps_p, pt_p)
            if reason:
                candidates.append(Candidate(r, c, cp, reason))
            elif M != "zero":
                new.append(Differential(r, c, cp, M))
        if new:
            chart = chart.with_differentials(new)
            installed += new
        if r < r_max:
            try:
                view = turn_page(chart, view)
            except ChartError as e:
                raise ComparisonError("transport-failed", f"transported chart is inconsistent: {e}",
                                      e.witness) from None
    return Propagation(chart, tuple(installed), tuple(candidates))


# -------------------------------------------------------------- towers


@dataclass(frozen=True)
class Stratum:
    h: int
    line: Line
    upper: Line  # next stratification line, or the cone top
    family: tuple[str, ...]
    chart_id: str
    annotation: Optional[dict] = None


@dataclass(frozen=True)
class TowerReport:
    strata: tuple[Stratum, ...]
    reports: Mapping[int, IsomReport]
    diagnostics: Mapping[int, tuple[Diagnostic, ...]]

    @property
    def passed(self) -> bool:
        return all(not d for d in self.diagnostics.values())


def proper_jumps(G: GroupDescriptor) -> list[int]:
    return [h for h in G.orders() if h < G.order]


def cyclic_annotation(G: GroupDescriptor, h: int) -> Optional[dict]:
    pn = cyclic_parameters(G)
    if pn is None or pn[1] == 0:
        return None
    p, n = pn
    k = round(math.log(h, p)) + 1
    if p ** (k - 1) != h:
        return None
    j = n - k
    loc = "a_sigma^{-1}" if (p == 2 and j == 0) else f"a_{{lambda_{j}}}^{{-1}}"
    return {"target": f"π_⋆ Φ^{{C_{p ** k}}}(X)", "residual_action": f"C_{p ** n}/C_{p ** k}",
            "localization": loc}


def tower_assemble(G: GroupDescriptor, V: VirtualRep, base: Chart, localized_charts: Mapping[int, Chart],
                   maps: Mapping[int, ChartMap], r_max: Optional[int] = None) -> TowerReport:
    """Check the localization chain and report which chart governs each band.

    ``maps[h]`` goes from the previous chart in the chain (``base`` for the
    smallest h) to ``localized_charts[h]``; each composite from ``base`` is
    checked against the recovery region of its order family.
    """
    jumps = proper_jumps(G)
    if sorted(localized_charts) != jumps or sorted(maps) != jumps:
        raise ComparisonError("chain-mismatch",
                              f"expected localized charts and maps for h in {jumps}, got "
                              f"{sorted(localized_charts)} and {sorted(maps)}",
                              {"expected": jumps, "charts": sorted(localized_charts), "maps": sorted(maps)})
    _, top = cone_lines(G, V)
    if not jumps:
        line = line_Lh(G, 1, V)
        fam = tuple(order_family(G, 1).sorted_members())
        return TowerReport((Stratum(1, line, top, fam, base.id),), {}, {1: ()})
    strata, reports, diags = [], {}, {}
    composite = None
    for i, h in enumerate(jumps):
        step = maps[h]
        composite = step if composite is None else compose(step, composite)
        rep = check_isom_on_line(composite, recovery_region(G, h, V), r_max)
        reports[h] = rep
        found = []
        for name, cond in (("condition1", rep.condition1), ("condition2", rep.condition2),
                           ("condition3", rep.condition3)):
            for w in cond.witnesses:
                found.append(Diagnostic(f"{name}-failed", f"h={h}: {w['reason']} at ({w['x']},{w['y']},"
                                        f"{w['level']}) page {w['page']}", w))
        diags[h] = tuple(found)
        upper = line_Lh(G, jumps[i + 1], V) if i + 1 < len(jumps) else top
        fam = tuple(order_family(G, h).sorted_members())
        strata.append(Stratum(h, line_Lh(G, h, V), upper, fam, localized_charts[h].id,
                              cyclic_annotation(G, h)))
    return TowerReport(tuple(strata), reports, diags)


# -------------------------------------------------------------- Mackey


def transfer_kernel_check(m: ChartMap, H, L: Boundary) -> list[Diagnostic]:
    """On E2 cells exactly on L: ker(phi) equals the transfer image from level H.

    At levels K not containing H the kernel must vanish instead.
    """
    G = m.source.group
    hid = getattr(H, "id", H)
    Hc = G.cls(hid)
    if not Hc.normal:
        raise ComparisonError("non-normal", f"{hid} is not normal; no kernel description is available", hid)
    if not m.source.level_maps:
        raise ComparisonError("missing-level-maps", "source chart carries no transfer data")
    transfers = {(lm.x, lm.y, lm.from_level, lm.to_level): lm.matrix
                 for lm in m.source.level_maps if lm.kind == "transfer"}
    diags = []
    for c in m.cells():
        if delta(L, c) != 0 or c not in m.source.cells:
            continue
        x, y, K = c
        ps = e2_cell(m.source.cells[c])
        n_s, n_t = m.source.ngens(c), m.target.ngens(c)
        pt = e2_cell(m.target.cells[c]) if c in m.target.cells else CellPage(Lattice.full(0), Lattice.full(0))
        ker = ps.Z.preimage(m.matrix(c), pt.B) if n_t else ps.Z
        if G.leq(hid, K):
            n_h = m.source.ngens((x, y, hid))
            T = transfers.get((x, y, hid, K))
            if T is None and K == hid:
                T = [[int(i == j) for j in range(n_h)] for i in range(n_s)]
            if T is None and n_h:
                diags.append(Diagnostic("missing-transfer", f"no transfer {hid}->{K} at ({x},{y})", c))
                continue
            cols = [tuple(T[i][j] for i in range(n_s)) for j in range(n_h)] if n_h else []
            image = Lattice.span(n_s, cols) + ps.B
            if not (ker <= image and image <= ker):
                diags.append(Diagnostic("transfer-kernel-mismatch",
                                        f"kernel of the map differs from the transfer image at {c}", c))
        elif not ker <= ps.B:
            diags.append(Diagnostic("kernel-nonzero", f"map is not injective at {c} although {hid} is not below {K}",
                                    c))
    return diags
