"""Command line entry point: ``slicestrat <subcommand> ...``.

Exit status is 0 on success, 1 when an input fails validation or a check
fails, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .chart import validate_chart
from .comparison import check_isom_on_line, propagate_differentials, validate_map
from .diagnostics import SliceStratError
from .families import Family, family_from_members, non_containing_family, order_family
from .geometry import Line, comparison_region, cone_lines, line_Lh, recovery_region, strata
from .groups import GroupDescriptor, validate_group
from .render import RenderSpec, render_svg
from .reps import parse_rep, validate_table
from .serialize import (FORMAT_VERSION, FormatError, Resolver, boundary_to_json, chart_from_json,
                        chartmap_from_json, diagnostics_to_json, dumps, group_from_json,
                        isom_report_to_json, line_to_json, propagation_to_json, region_to_json,
                        table_from_json)


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    def __init__(self, doc):
        super().__init__("validation failed")
        self.doc = doc


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e}") from None


def _resolver(args) -> Resolver:
    res = Resolver()
    G = None
    if getattr(args, "group_file", None):
        G = group_from_json(_load_json(args.group_file))
        diags = validate_group(G)
        if diags:
            raise ValidationFailure({"format_version": FORMAT_VERSION, "group": G.name,
                                     "diagnostics": diagnostics_to_json(diags)})
        res.add(G)
    if getattr(args, "table_file", None):
        doc = _load_json(args.table_file)
        G = G or res.group(doc.get("group", ""))
        T = table_from_json(doc, G)
        diags = validate_table(T)
        if diags:
            raise ValidationFailure({"format_version": FORMAT_VERSION, "group": G.name,
                                     "diagnostics": diagnostics_to_json(diags)})
        res.add(G, T)
    return res


def _group_and_V(args):
    res = _resolver(args)
    name = args.group or (next(iter(res.groups)) if res.groups else None)
    if name is None:
        raise UsageError("--group or --group-file is required")
    G = res.group(name)
    T = res.table(name)
    return G, parse_rep(T, args.V)


def parse_family(G: GroupDescriptor, text: str) -> Family:
    """``le:h`` | ``not:ID`` | ``ids:a,b,...`` | ``empty`` | ``all``."""
    text = text.strip()
    if text == "empty":
        return family_from_members(G, [])
    if text == "all":
        return family_from_members(G, G.ids)
    kind, _, arg = text.partition(":")
    if kind == "le":
        try:
            return order_family(G, int(arg))
        except ValueError:
            raise UsageError(f"bad order in family spec {text!r}") from None
    if kind == "not":
        return non_containing_family(G, arg)
    if kind == "ids":
        return family_from_members(G, [a for a in arg.split(",") if a])
    raise UsageError(f"unknown family spec {text!r}")


def parse_boundary(text: str, G: GroupDescriptor, V):
    """``slope,intercept`` | ``h:N`` (stratification line) | ``recovery:N`` (two-piece region)."""
    text = text.strip()
    if text.startswith("h:"):
        return line_Lh(G, int(text[2:]), V)
    if text.startswith("recovery:"):
        return recovery_region(G, int(text[9:]), V)
    try:
        a, b = text.split(",")
        return Line(int(a), int(b))
    except ValueError:
        raise UsageError(f"bad line spec {text!r}; expected 'slope,intercept', 'h:N' or 'recovery:N'") from None


def _emit(args, text: str):
    if getattr(args, "out", None):
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_strata(args) -> int:
    G, V = _group_and_V(args)
    rows = [{"h": h, **line_to_json(L)} for h, L in strata(G, V)]
    _emit(args, dumps({"format_version": FORMAT_VERSION, "group": G.name, "V": str(V),
                       "strata": rows, "slopes": [r["slope"] for r in rows]}))
    return 0


def cmd_cone(args) -> int:
    G, V = _group_and_V(args)
    bottom, top = cone_lines(G, V)
    _emit(args, dumps({"format_version": FORMAT_VERSION, "group": G.name, "V": str(V),
                       "y_min_line": str(bottom), "y_max_line": str(top),
                       "bottom": line_to_json(bottom), "top": line_to_json(top)}))
    return 0


def cmd_region(args) -> int:
    G, V = _group_and_V(args)
    F, F2 = parse_family(G, args.F), parse_family(G, args.F2)
    R = comparison_region(F, F2, V)
    _emit(args, dumps({"format_version": FORMAT_VERSION, "group": G.name, "V": str(V),
                       "F": F.sorted_members(), "F2": F2.sorted_members(), "region": region_to_json(R)}))
    return 0


def _load_chart(path, res):
    c = chart_from_json(_load_json(path), res)
    diags = validate_chart(c)
    if diags:
        raise ValidationFailure({"format_version": FORMAT_VERSION, "chart": path,
                                 "diagnostics": diagnostics_to_json(diags)})
    return c


def _load_map(path, source, target):
    m = chartmap_from_json(_load_json(path), source, target)
    diags = validate_map(m)
    if diags:
        raise ValidationFailure({"format_version": FORMAT_VERSION, "map": path,
                                 "diagnostics": diagnostics_to_json(diags)})
    return m


def cmd_check(args) -> int:
    res = _resolver(args)
    src = _load_chart(args.source, res)
    tgt = _load_chart(args.target, res)
    m = _load_map(args.map, src, tgt)
    L = parse_boundary(args.line, src.group, src.V)
    rep = check_isom_on_line(m, L, args.r_max)
    _emit(args, dumps(isom_report_to_json(rep)))
    return 0 if rep.passed else 1


def cmd_propagate(args) -> int:
    res = _resolver(args)
    src = _load_chart(args.source, res)
    tgt = _load_chart(args.target, res)
    m = _load_map(args.map, src, tgt)
    L = parse_boundary(args.line, src.group, src.V)
    p = propagate_differentials(src, tgt, m, L, args.r_max)
    doc = propagation_to_json(p)
    doc["boundary"] = boundary_to_json(L)
    _emit(args, dumps(doc))
    return 0


def cmd_render(args) -> int:
    res = _resolver(args)
    c = _load_chart(args.chart, res)
    overlay = []
    if args.strata:
        overlay += [(L, "strata") for _, L in strata(c.group, c.V)]
    if args.cone:
        overlay += [(L, "cone") for L in cone_lines(c.group, c.V)]
    for spec in args.line or []:
        b = parse_boundary(spec, c.group, c.V)
        if not isinstance(b, Line):
            raise UsageError("--line takes a single line")
        overlay.append((b, "line"))
    svg = render_svg(RenderSpec(c, args.page, tuple(overlay), scale=args.scale))
    _emit(args, svg)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slicestrat", description="Stratification geometry and chart comparison.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, with_group=True):
        if with_group:
            sp.add_argument("--group", help="built-in group name (C1, C2, C4, C8, C3, C9, Q8)")
            sp.add_argument("--V", default="0", help='sparse multiplicities, e.g. "sigma:1,lambda1:-2"')
        sp.add_argument("--group-file", help="JSON group descriptor")
        sp.add_argument("--table-file", help="JSON irreducible table")
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("strata", help="stratification lines")
    common(sp)
    sp.set_defaults(func=cmd_strata)

    sp = sub.add_parser("cone", help="positive cone bounding lines")
    common(sp)
    sp.set_defaults(func=cmd_cone)

    sp = sub.add_parser("region", help="comparison region of two nested families")
    sp.add_argument("F", help="smaller family: le:h | not:ID | ids:a,b | empty | all")
    sp.add_argument("F2", help="larger family")
    common(sp)
    sp.set_defaults(func=cmd_region)

    for name, func in (("check", cmd_check), ("propagate", cmd_propagate)):
        sp = sub.add_parser(name, help=f"{name} a chart map against a line")
        sp.add_argument("source")
        sp.add_argument("target")
        sp.add_argument("map")
        sp.add_argument("line", help="slope,intercept | h:N | recovery:N")
        sp.add_argument("--r-max", type=int, default=None)
        common(sp, with_group=False)
        sp.set_defaults(func=func)

    sp = sub.add_parser("render", help="SVG of one chart page")
    sp.add_argument("chart")
    sp.add_argument("page", type=int)
    sp.add_argument("--strata", action="store_true", help="overlay stratification lines")
    sp.add_argument("--cone", action="store_true", help="overlay positive cone lines")
    sp.add_argument("--line", action="append", help="extra overlay line slope,intercept")
    sp.add_argument("--scale", type=int, default=40)
    common(sp, with_group=False)
    sp.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required")
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return 2
    except ValidationFailure as e:
        sys.stdout.write(dumps(e.doc))
        return 1
    except (SliceStratError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
