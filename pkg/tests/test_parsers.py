from fractions import Fraction
from pathlib import Path

import pytest

from primcalc.models.graph import FULL, PathPoint
from primcalc.models.lattice import TorusPoint
from primcalc.services import graphalg as ga
from primcalc.services import parsers
from primcalc.services import torusgeo as tg
from primcalc.services import zklattice as zk
from primcalc.utils.error_handling import InputError

FIXTURES = Path(__file__).parent / "fixtures"
V = frozenset({"v"})
VW = frozenset({"v", "w"})


def test_dumbbell_fixture():
    g = parsers.parse_graph_file(FIXTURES / "dumbbell.graph")
    assert g.name == "dumbbell"
    assert g.vertices == ["v", "w"]
    assert len(g.edges) == 3
    assert g.edge("f").range == "v" and g.edge("f").source == "w"


def test_subshift_fixture():
    g = parsers.parse_kgraph_file(FIXTURES / "subshift.kgraph")
    assert len(g.vertices) == 2
    assert len([e for e in g.edges if e.color.value == "blue"]) == 3
    assert len([e for e in g.edges if e.color.value == "red"]) == 3
    assert len(g.squares) == 4
    assert str(g.squares[1]) == "af=fc"


def test_malformed_square_reports_location():
    text = "kgraph bad\nvertex v\nblue a v v\nsquare a e e a\n"
    with pytest.raises(InputError) as info:
        parsers.parse_kgraph(text)
    assert info.value.line == 4
    assert info.value.column == 12
    assert "line 4" in str(info.value)


def test_unparse_round_trips():
    g = parsers.parse_graph_file(FIXTURES / "dumbbell.graph")
    assert parsers.parse_graph(parsers.unparse_graph(g)) == g
    for name in ("torus", "subshift", "s1", "xtype"):
        k = parsers.parse_kgraph_file(FIXTURES / f"{name}.kgraph")
        assert parsers.parse_kgraph(parsers.unparse_kgraph(k)) == k


def test_dset_file():
    d = parsers.parse_dset_file(FIXTURES / "subshift.dset")
    assert tg.equal(d.fibers["v"], tg.box(("1/8", "1/8"), ("3/8", "3/8")))
    assert tg.is_full(d.fibers["w"])
    back = parsers.parse_dset(parsers.unparse_dset(d))
    assert all(tg.equal(back.fibers[v], d.fibers[v]) for v in d.vertices())


def test_dset_rejects_repeated_vertex():
    with pytest.raises(InputError) as info:
        parsers.parse_dset("v = FULL\nv = EMPTY\n")
    assert info.value.line == 2


@pytest.mark.parametrize("text,expected", [
    ("FULL", tg.full(1)),
    ("EMPTY", tg.empty(1)),
    ("BOX(1/4,1/2)", tg.box(("1/4",), ("1/2",))),
    ("UNION(BOX(0,1/4), BOX(1/2,3/4))", tg.union(tg.box((0,), ("1/4",)), tg.box(("1/2",), ("3/4",)))),
    ("INTER(BOX(0,1/2), BOX(1/4,3/4))", tg.box(("1/4",), ("1/2",))),
])
def test_circle_expressions(text, expected):
    assert tg.equal(parsers.parse_torus(text, k=1), expected)


def test_saturation_expression():
    w = parsers.parse_torus("SAT(BOX(1/8,3/8; 1/8,3/8); H=[[1,-1]])")
    box = tg.box(("1/8", "1/8"), ("3/8", "3/8"))
    assert tg.equal(w, tg.saturate(box, zk.canonicalize([[1, -1]], 2)))


def test_box_arity_is_checked():
    with pytest.raises(InputError):
        parsers.parse_torus("BOX(0,1/2)", k=2)
    with pytest.raises(InputError):
        parsers.parse_torus("POLY(0,0; 1/2,0; 0,1/2)", k=1)


def test_points_and_targets():
    points = parsers.parse_points("({v,w},1/3) ({v},FULL)")
    assert points == [(VW, TorusPoint.of("1/3")), (V, FULL)]
    assert parsers.parse_target("({v},0)") == (V, TorusPoint.of(0))
    with pytest.raises(InputError):
        parsers.parse_target("({v},0), ({v},1/2)")
    with pytest.raises(InputError):
        parsers.parse_target("({v},FULL)")


def test_sequences():
    seq = parsers.parse_sequence("({v},0) ... ({v,w},1/3) ({v},1/4) ...")
    assert seq.prefix == [(V, TorusPoint.of(0))]
    assert seq.tail == [(VW, TorusPoint.of("1/3")), (V, TorusPoint.of("1/4"))]
    assert parsers.parse_sequence("...({v,w},1/3)...").prefix == []
    with pytest.raises(InputError):
        parsers.parse_sequence("...({v},FULL)...")
    with pytest.raises(InputError):
        parsers.parse_sequence("({v},0) ...")


def test_open_set_file():
    g = parsers.parse_graph_file(FIXTURES / "dumbbell.graph")
    tails = ga.maximal_tails(g)
    o = parsers.parse_open_set(parsers.read_text(FIXTURES / "dumbbell.open"), tails)
    assert tg.equal(o.fibers[VW], tg.box(("1/4",), ("1/2",)))
    assert o.fibers[V].is_empty
    assert ga.is_open(g, o)
    back = parsers.parse_open_set(parsers.unparse_open_set(o), tails)
    assert all(tg.equal(back.fibers[t], o.fibers[t]) for t in o.fibers)


def test_open_set_point_fibers_take_full_or_empty():
    g = parsers.parse_graph_file(FIXTURES / "twoloops.graph")
    tails = ga.maximal_tails(g)
    assert parsers.parse_open_set("{v} = FULL", tails).fibers[V] is True
    assert parsers.parse_open_set("", tails).fibers[V] is False
    with pytest.raises(InputError):
        parsers.parse_open_set("{v} = BOX(0,1/2)", tails)
    with pytest.raises(InputError):
        parsers.parse_open_set("{w} = FULL", tails)


def test_path_points_and_words():
    x = PathPoint(("f",), ("g",))
    assert parsers.parse_path_point("f.(g)^inf") == x
    assert parsers.parse_path_point(str(x)) == x
    assert parsers.parse_path_point("(e)") == PathPoint((), ("e",))
    assert parsers.parse_path_point("e.f.(g.h)") == PathPoint(("e", "f"), ("g", "h"))
    assert parsers.parse_word("e.e.f") == ("e", "e", "f")
    with pytest.raises(InputError):
        parsers.parse_path_point("f.g")


def test_rational_values_are_exact():
    (point,) = parsers.parse_points("({v},-1/3)")
    assert point[1] == TorusPoint.of(Fraction(2, 3))
