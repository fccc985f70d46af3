import json

import pytest

from primcalc.models.graph import DirGraph, Edge, MaximalTail, PrimPresentation
from primcalc.models.report import CheckStatus, Report
from primcalc.services import export
from primcalc.services import graphalg as ga
from primcalc.services import zklattice as zk
from primcalc.utils.error_handling import InputError


def dumbbell():
    return DirGraph("dumbbell", ["v", "w"], [Edge("e", "v", "v"), Edge("f", "v", "w"), Edge("g", "w", "w")])


def chain():
    tails = [MaximalTail(frozenset(s), 0) for s in ("a", "ab", "abc")]
    return PrimPresentation(tails, ga.orbit_closure_order(tails))


def test_prim_dot_draws_covering_edges_only():
    dot = export.prim_dot(chain())
    assert dot.count("->") == 2
    assert "t2 -> t1;" in dot and "t1 -> t0;" in dot
    assert export.prim_dot(chain(), reduce=False).count("->") == 3
    assert "shape=box" in dot


def test_graph_dot():
    dot = export.graph_dot(dumbbell())
    assert dot.startswith('digraph "dumbbell" {')
    assert '"w" -> "v" [label="f"];' in dot


def test_report_text_and_json():
    report = Report("demo")
    report.add("first", True, value=1)
    report.add("second", False, value=0.5, tolerance=1e-6, witness=["x"])
    report.notes['h0'] = [0]
    text = export.report_text(report)
    assert text.splitlines()[0] == "demo: FAIL"
    assert "[ok] first = 1" in text
    assert "[FAIL] second = 0.5 (tol 1e-06) witness ['x']" in text
    data = json.loads(export.to_json(report))
    assert data["pass"] is False
    assert [c["status"] for c in data["checks"]] == [CheckStatus.PASS.value, CheckStatus.FAIL.value]


def test_render_dispatch():
    presentation = ga.prim_presentation(dumbbell())
    assert export.render(presentation, "dot").startswith("digraph prim")
    assert "{v,w} circle" in export.render(presentation, "text")
    assert json.loads(export.render(zk.full_lattice(1), "json")) == {"ambient_rank": 1, "basis": [[1]]}
    assert export.render([["w"], []], "text") == "{w}\n{}"
    with pytest.raises(InputError):
        export.render(zk.full_lattice(1), "dot")
    with pytest.raises(InputError):
        export.render(presentation, "yaml")


def test_save_output_creates_directories(tmp_path):
    target = tmp_path / "deep" / "er" / "prim.dot"
    assert export.save_output(target, "digraph {}") == target
    assert target.read_text(encoding="utf-8") == "digraph {}\n"
