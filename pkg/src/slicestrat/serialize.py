"""JSON formats for groups, tables, charts, chart maps, lines and reports.

Every top-level document carries ``format_version``.  Rational matrix entries
are written as ``"p/q"`` strings; integers stay integers.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping, Optional

from .chart import Chart, Differential, FgaGroup, LevelMap, Window
from .comparison import Candidate, ChartMap, IsomReport, Propagation, TowerReport
from .diagnostics import Diagnostic, SliceStratError
from .geometry import Line, Piece, Region
from .groups import BUILTIN_GROUPS, GroupDescriptor, SubgroupClass, builtin_group
from .reps import Irreducible, IrreducibleTable, builtin_table, format_rep, parse_rep

FORMAT_VERSION = 1


class FormatError(SliceStratError, ValueError):
    pass


def _check_version(doc: Mapping):
    v = doc.get("format_version")
    if v != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {v!r}")


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -------------------------------------------------------------- scalars


def entry_to_json(a):
    if isinstance(a, Fraction):
        return a.numerator if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
    return int(a)


def entry_from_json(a):
    if isinstance(a, str):
        f = Fraction(a)
        return f.numerator if f.denominator == 1 else f
    if isinstance(a, bool) or not isinstance(a, int):
        raise FormatError(f"matrix entry {a!r} is neither an integer nor a 'p/q' string")
    return a


def matrix_to_json(M):
    return [[entry_to_json(a) for a in row] for row in M]


def matrix_from_json(M):
    return [[entry_from_json(a) for a in row] for row in M]


def line_to_json(L: Line) -> dict:
    return {"slope": L.slope, "intercept": L.intercept, "equation": str(L)}


def line_from_json(d: Mapping) -> Line:
    return Line(int(d["slope"]), int(d["intercept"]))


def region_to_json(R: Region) -> dict:
    return {"pieces": [{"x_min": p.x_min, "x_max": p.x_max,
                        "constraints": [{"line": line_to_json(l), "sense": s} for l, s in p.constraints]}
                       for p in R.pieces]}


def region_from_json(d: Mapping) -> Region:
    return Region(tuple(Piece(p["x_min"], p["x_max"],
                              tuple((line_from_json(c["line"]), c["sense"]) for c in p["constraints"]))
                        for p in d["pieces"]))


def boundary_to_json(b) -> dict:
    return {"line": line_to_json(b)} if isinstance(b, Line) else {"region": region_to_json(b)}


# -------------------------------------------------------------- groups and tables


def group_to_json(G: GroupDescriptor) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "name": G.name,
        "order": G.order,
        "subgroup_classes": [{"id": c.id, "order": c.order, "class_size": c.class_size, "normal": c.normal}
                             for c in G.subgroup_classes],
        "subconjugacy": [list(p) for p in sorted(G.subconjugacy)],
    }


def group_from_json(d: Mapping) -> GroupDescriptor:
    _check_version(d)
    try:
        classes = tuple(SubgroupClass(c["id"], int(c["order"]), int(c.get("class_size", 1)),
                                      bool(c.get("normal", True))) for c in d["subgroup_classes"])
        rel = frozenset((a, b) for a, b in d["subconjugacy"])
        return GroupDescriptor(d["name"], int(d["order"]), classes, rel)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed group descriptor: {e}") from None


def table_to_json(T: IrreducibleTable) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "group": T.group.name,
        "irreducibles": [{"id": w.id, "dim": w.dim, "fixed_dim": dict(sorted(w.fixed_dim.items())),
                          "mult_in_regular": w.mult_in_regular} for w in T.irreducibles],
        "aliases": {k: dict(v) for k, v in sorted(T.aliases.items())},
    }


def table_from_json(d: Mapping, G: GroupDescriptor) -> IrreducibleTable:
    _check_version(d)
    if d.get("group", G.name) != G.name:
        raise FormatError(f"table is for group {d.get('group')!r}, not {G.name!r}")
    try:
        irrs = tuple(Irreducible(w["id"], int(w["dim"]), {k: int(v) for k, v in w["fixed_dim"].items()},
                                 int(w.get("mult_in_regular", 1))) for w in d["irreducibles"])
        aliases = {k: {a: int(b) for a, b in v.items()} for k, v in d.get("aliases", {}).items()}
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed irreducible table: {e}") from None
    return IrreducibleTable(G, irrs, aliases)


class Resolver:
    """Looks up groups and tables by name: user-supplied first, then built-ins."""

    def __init__(self):
        self.groups: dict[str, GroupDescriptor] = {}
        self.tables: dict[str, IrreducibleTable] = {}

    def add(self, G: GroupDescriptor, T: Optional[IrreducibleTable] = None):
        self.groups[G.name] = G
        if T is not None:
            self.tables[G.name] = T

    def group(self, name: str) -> GroupDescriptor:
        if name in self.groups:
            return self.groups[name]
        return builtin_group(name)

    def table(self, name: str) -> IrreducibleTable:
        if name in self.tables:
            return self.tables[name]
        if name in self.groups and name not in BUILTIN_GROUPS:
            raise FormatError(f"group {name!r} was supplied without an irreducible table")
        return builtin_table(name)


# -------------------------------------------------------------- charts


def _cell_key(d: Mapping):
    return int(d["x"]), int(d["y"]), str(d["level"])


def chart_to_json(c: Chart) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "id": c.id,
        "group_ref": c.group.name,
        "V": format_rep(c.V),
        "window": {"x_min": c.window.x_min, "x_max": c.window.x_max,
                   "y_min": c.window.y_min, "y_max": c.window.y_max},
        "cells": [{"x": x, "y": y, "level": lev, "free_rank": g.free_rank, "torsion": list(g.torsion),
                   "labels": list(g.labels)} for (x, y, lev), g in c.cells.items()],
        "differentials": [],
    }
    for d in c.differentials:
        entry = {"r": d.r, "source": {"x": d.source[0], "y": d.source[1], "level": d.source[2]},
                 "target_level": d.target[2], "matrix": matrix_to_json(d.matrix)}
        if (d.target[0], d.target[1]) != (d.source[0] - 1, d.source[1] + d.r):
            entry["target"] = {"x": d.target[0], "y": d.target[1], "level": d.target[2]}
        doc["differentials"].append(entry)
    if c.level_maps:
        doc["level_maps"] = [{"x": m.x, "y": m.y, "kind": m.kind, "from_level": m.from_level,
                              "to_level": m.to_level, "matrix": matrix_to_json(m.matrix)}
                             for m in c.level_maps]
    return doc


def chart_from_json(d: Mapping, resolver: Optional[Resolver] = None) -> Chart:
    _check_version(d)
    resolver = resolver or Resolver()
    try:
        G = resolver.group(d["group_ref"])
        T = resolver.table(d["group_ref"])
        V = parse_rep(T, str(d.get("V", "0")))
        w = d["window"]
        window = Window(int(w["x_min"]), int(w["x_max"]), int(w["y_min"]), int(w["y_max"]))
        cells = {}
        for e in d.get("cells", []):
            key = _cell_key(e)
            if key in cells:
                raise FormatError(f"duplicate cell {key}")
            cells[key] = FgaGroup(int(e.get("free_rank", 0)), tuple(int(t) for t in e.get("torsion", [])),
                                  tuple(e.get("labels", [])))
        diffs = []
        for e in d.get("differentials", []):
            src = _cell_key(e["source"])
            r = int(e["r"])
            if "target" in e:
                tgt = _cell_key(e["target"])
            else:
                tgt = (src[0] - 1, src[1] + r, str(e.get("target_level", src[2])))
            diffs.append(Differential(r, src, tgt, matrix_from_json(e["matrix"])))
        maps = tuple(LevelMap(int(e["x"]), int(e["y"]), e["kind"], e["from_level"], e["to_level"],
                              matrix_from_json(e["matrix"])) for e in d.get("level_maps", []))
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed chart: {e}") from None
    return Chart(G, V, window, cells, tuple(diffs), maps, str(d.get("id", "chart")))


def chartmap_to_json(m: ChartMap) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "source_ref": m.source.id,
        "target_ref": m.target.id,
        "matrices": [{"x": x, "y": y, "level": lev, "matrix": matrix_to_json(M)}
                     for (x, y, lev), M in m.matrices.items()],
    }


def chartmap_from_json(d: Mapping, source: Chart, target: Chart) -> ChartMap:
    _check_version(d)
    for key, chart in (("source_ref", source), ("target_ref", target)):
        if key in d and d[key] != chart.id:
            raise FormatError(f"{key} {d[key]!r} does not match chart id {chart.id!r}")
    try:
        mats = {_cell_key(e): matrix_from_json(e["matrix"]) for e in d.get("matrices", [])}
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed chart map: {e}") from None
    return ChartMap(source, target, mats)


# -------------------------------------------------------------- reports


def diagnostics_to_json(diags) -> list:
    return [d.to_json() for d in diags]


def isom_report_to_json(rep: IsomReport) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "boundary": boundary_to_json(rep.line),
        "condition1": rep.condition1.to_json(),
        "condition2": rep.condition2.to_json(),
        "condition3": rep.condition3.to_json(),
        "page_range": list(rep.page_range),
        "passed": rep.passed,
    }


def propagation_to_json(p: Propagation) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "chart": chart_to_json(p.chart),
        "installed": [{"r": d.r, "source": list(d.source), "target": list(d.target),
                       "matrix": matrix_to_json(d.matrix)} for d in p.installed],
        "candidates": [c.to_json() for c in p.candidates],
    }


def tower_report_to_json(t: TowerReport) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "strata": [{"h": s.h, "line": line_to_json(s.line), "upper": line_to_json(s.upper),
                    "family": list(s.family), "chart": s.chart_id, "annotation": s.annotation}
                   for s in t.strata],
        "diagnostics": {str(h): diagnostics_to_json(d) for h, d in sorted(t.diagnostics.items())},
        "passed": t.passed,
    }
