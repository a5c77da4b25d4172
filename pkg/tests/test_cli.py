import json
import random
import subprocess
import sys

import pytest

from fixtures import golden_charts, transport_fixture
from slicestrat import RenderSpec, builtin_group, builtin_table, propagate_differentials, render_svg
from slicestrat.chart import Differential
from slicestrat.cli import main
from slicestrat.geometry import Line
from slicestrat.serialize import (chart_from_json, chart_to_json, chartmap_to_json, dumps, group_to_json,
                                  line_from_json, region_from_json, table_to_json)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(path, doc):
    path.write_text(dumps(doc))
    return str(path)


def test_strata(capsys):
    code, out, _ = run(capsys, "strata", "--group", "C4", "--V", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["slopes"] == [0, 1, 3]
    assert [line_from_json(r) for r in doc["strata"]] == [Line(0, 0), Line(1, 0), Line(3, 0)]
    assert doc["format_version"] == 1


def test_strata_with_virtual_V(capsys):
    code, out, _ = run(capsys, "strata", "--group", "C2", "--V", "sigma:-1")
    assert code == 0
    assert [r["equation"] for r in json.loads(out)["strata"]] == ["y=0", "y=x+1"]


def test_cone(capsys):
    code, out, _ = run(capsys, "cone", "--group", "C2", "--V", "0")
    doc = json.loads(out)
    assert code == 0
    assert (doc["y_min_line"], doc["y_max_line"]) == ("y=0", "y=x")


def test_region(capsys):
    code, out, _ = run(capsys, "region", "le:1", "le:2", "--group", "C4")
    assert code == 0
    R = region_from_json(json.loads(out)["region"])
    assert [p.constraints[0][0] for p in R.pieces] == [Line(1, 0), Line(1, 0)]
    code, _, err = run(capsys, "region", "le:2", "le:2", "--group", "C4")
    assert code == 1 and "equal" in err
    code, _, _ = run(capsys, "region", "weird", "all", "--group", "C4")
    assert code == 2


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "strata")[0] == 2
    assert run(capsys, "strata", "--group", "C4", "--V", "nope:1")[0] == 1
    assert run(capsys, "render", "/does/not/exist.json", "2")[0] == 2


def test_user_supplied_group(tmp_path, capsys):
    G = builtin_group("C2")
    gdoc = {**group_to_json(G), "name": "Z2"}
    tdoc = {**table_to_json(builtin_table("C2")), "group": "Z2"}
    code, out, _ = run(capsys, "strata", "--group-file", write(tmp_path / "g.json", gdoc),
                       "--table-file", write(tmp_path / "t.json", tdoc), "--V", "sigma")
    assert code == 0
    assert json.loads(out)["group"] == "Z2"
    bad = {**gdoc, "subgroup_classes": [c for c in gdoc["subgroup_classes"] if c["order"] != 1]}
    code, out, _ = run(capsys, "strata", "--group-file", write(tmp_path / "bad.json", bad))
    assert code == 1
    assert "missing-trivial" in [d["code"] for d in json.loads(out)["diagnostics"]]


def test_invalid_chart_reports_diagnostics(tmp_path, capsys):
    _, _, mixed = golden_charts()
    bad = mixed.with_differentials([Differential(2, (1, 0, "C4"), (0, 3, "C4"), [[1]])])
    code, out, _ = run(capsys, "render", write(tmp_path / "c.json", chart_to_json(bad)), "2")
    assert code == 1
    assert "bad-bidegree" in [d["code"] for d in json.loads(out)["diagnostics"]]
    (tmp_path / "junk.json").write_text("{not json")
    assert run(capsys, "render", str(tmp_path / "junk.json"), "2")[0] == 1


def _fixture_files(tmp_path):
    rng = random.Random(2)
    while True:
        fx = transport_fixture(rng)
        if fx.L.__class__ is Line:
            p = propagate_differentials(fx.source_e2, fx.target, fx.phi, fx.L, fx.r_max)
            if p.installed:
                break
    s = write(tmp_path / "s.json", chart_to_json(fx.source_e2))
    t = write(tmp_path / "t.json", chart_to_json(fx.target))
    m = write(tmp_path / "m.json", chartmap_to_json(fx.phi))
    return fx, p, s, t, m


def test_propagate_and_check(tmp_path, capsys):
    fx, p, s, t, m = _fixture_files(tmp_path)
    line = f"{fx.L.slope},{fx.L.intercept}"
    out_path = tmp_path / "out" / "prop.json"
    code, _, _ = run(capsys, "propagate", s, t, m, line, "--r-max", "4", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert chart_from_json(doc["chart"]) == p.chart
    assert len(doc["installed"]) == len(p.installed)
    assert doc["boundary"]["line"]["slope"] == fx.L.slope

    # before transport the source lacks the differentials above the line
    code, out, _ = run(capsys, "check", s, t, m, line, "--r-max", "4")
    assert code == 1
    assert json.loads(out)["passed"] is False
    done = write(tmp_path / "done.json", {**doc["chart"], "id": "source"})
    code, out, _ = run(capsys, "check", done, t, m, line, "--r-max", "4")
    assert code == 0 and json.loads(out)["passed"] is True
    assert run(capsys, "check", done, t, m, "1;2")[0] == 2


def test_region_boundaries_on_the_command_line(tmp_path, capsys):
    _, _, mixed = golden_charts()
    c = write(tmp_path / "c.json", chart_to_json(mixed))
    ident = {"format_version": 1, "matrices": [{"x": x, "y": y, "level": lev,
                                                "matrix": [[int(i == j) for j in range(g.ngens)] for i in range(g.ngens)]}
                                               for (x, y, lev), g in mixed.cells.items()]}
    m = write(tmp_path / "m.json", ident)
    for spec in ("h:2", "recovery:4", "0,0"):
        code, out, _ = run(capsys, "check", c, c, m, spec)
        assert code == 0, spec


def test_render_matches_library(tmp_path, capsys):
    empty, _, mixed = golden_charts()
    c = write(tmp_path / "c.json", chart_to_json(mixed))
    code, out, _ = run(capsys, "render", c, "3", "--line", "1,-1", "--scale", "40")
    assert code == 0
    assert out == render_svg(RenderSpec(mixed, 3, ((Line(1, -1), "line"),)))
    e = write(tmp_path / "e.json", chart_to_json(empty))
    code, out, _ = run(capsys, "render", e, "2", "--strata", "--cone")
    assert code == 0 and out.count('class="strata"') == 3 and out.count('class="cone"') == 2
    assert run(capsys, "render", e, "2", "--line", "recovery:2")[0] == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "slicestrat", "strata", "--group", "C9"],
                         capture_output=True, check=True, text=True).stdout
    assert json.loads(out)["slopes"] == [0, 2, 8]
    bad = subprocess.run([sys.executable, "-m", "slicestrat", "nonsense"], capture_output=True)
    assert bad.returncode == 2
