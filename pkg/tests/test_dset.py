import itertools
import json
import random
from fractions import Fraction

import pytest

from primcalc.models.dset import ClassFibers, DSet
from primcalc.models.kgraph import Color, KEdge, Square, TwoGraph
from primcalc.models.lattice import TorusPoint
from primcalc.services import dset as ds
from primcalc.services import kgraph2 as kg
from primcalc.services import torusgeo as tg
from primcalc.services import zklattice as zk
from primcalc.utils.error_handling import InputError

FULL = tg.full(2)
EMPTY = tg.empty(2)
BOX = tg.box(("1/8", "1/8"), ("3/8", "3/8"))


def build(name, vertices, blue, red, squares):
    edges = [KEdge(n, Color.BLUE, r, s) for n, r, s in blue]
    edges += [KEdge(n, Color.RED, r, s) for n, r, s in red]
    return TwoGraph(name, vertices, edges, [Square(*sq) for sq in squares])


def torus():
    return build("torus", ["v"], [("e", "v", "v")], [("f", "v", "v")], [("e", "f", "f", "e")])


def subshift():
    return build(
        "subshift", ["v", "w"],
        [("a", "v", "v"), ("b", "v", "w"), ("c", "w", "w")],
        [("e", "v", "v"), ("f", "v", "w"), ("g", "w", "w")],
        [("a", "e", "e", "a"), ("a", "f", "f", "c"), ("b", "g", "e", "b"), ("c", "g", "g", "c")],
    )


def xtype(n=3):
    us = [f"u{i}" for i in range(n)]
    blue = [(f"b{i}", us[i], us[(i + 1) % n]) for i in range(n)]
    red = [(f"r{i}", us[i], us[i]) for i in range(n)]
    squares = [(f"b{i}", f"r{(i + 1) % n}", f"r{i}", f"b{i}") for i in range(n)]
    return build("xtype", us, blue, red, squares)


def s1():
    return build("s1", ["x"], [("e1", "x", "x"), ("e2", "x", "x")],
                 [("f1", "x", "x"), ("f2", "x", "x")],
                 [(f"e{i}", f"f{j}", f"f{i}", f"e{j}") for i in (1, 2) for j in (1, 2)])


def s1_table():
    return kg.load_class_table(json.dumps({
        "classes": [{"name": "[x]", "core": ["x"], "H": [[1, -1]], "trace": ["x"]}],
        "acc": [[0]],
    }))


def subshift_table():
    return kg.load_class_table(json.dumps({
        "classes": [
            {"name": "[v]", "core": ["v"], "H": [[1, 0], [0, 1]], "trace": ["v"]},
            {"name": "[w]", "core": ["w"], "H": [[1, 0], [0, 1]], "trace": ["v", "w"]},
        ],
        "acc": [[0, 1], [1]],
    }))


def same(d1, d2):
    return d1.vertices() == d2.vertices() and all(tg.equal(d1.fibers[v], d2.fibers[v]) for v in d1.vertices())


def test_constant_dsets_pass():
    for fiber in (FULL, EMPTY, BOX):
        report = ds.check_all(torus(), ds.constant(torus(), fiber))
        assert report.passed


def test_D1_failure_names_the_edge():
    d = DSet({"v": FULL, "w": EMPTY})
    report = ds.check_D1(subshift(), d)
    failed = sorted(c.witness["edge"] for c in report.failures())
    assert failed == ["b", "f"]
    assert all(c.witness["point"] is not None for c in report.failures())
    assert ds.check_D1(subshift(), DSet({"v": EMPTY, "w": FULL})).passed


def test_D2_failure_at_a_unique_edge():
    d = DSet({"u0": EMPTY, "u1": FULL, "u2": FULL})
    report = ds.check_D2(xtype(), d)
    (bad,) = report.failures()
    assert bad.witness["vertex"] == "u0" and bad.witness["degree"] == "blue"


def test_D2_vacuous_for_disjoint_fibers():
    far = tg.box(("1/2", "1/2"), ("3/4", "3/4"))
    assert ds.check_D2(subshift(), DSet({"v": BOX, "w": far})).passed


def test_D3_on_the_torus_accepts_any_open_fiber():
    table = kg.class_table(torus())
    assert ds.check_D3(torus(), DSet({"v": BOX}), table).passed


def test_D3_needs_diagonal_strips_on_s1():
    table = s1_table()
    report = ds.check_D3(s1(), DSet({"x": BOX}), table)
    assert not report.passed
    assert report.failures()[0].witness["vertex"] == "x"
    strip = tg.saturate(BOX, table.classes[0].group)
    assert ds.check_D3(s1(), DSet({"x": strip}), table).passed


def test_dset_must_cover_the_vertices():
    with pytest.raises(InputError):
        ds.check_D1(subshift(), DSet({"v": FULL}))
    with pytest.raises(InputError):
        ds.check_D1(torus(), DSet({"v": tg.full(1)}))


def test_roundtrip_of_full_dset():
    g = subshift()
    assert ds.roundtrip(g, ds.constant(g, FULL), subshift_table())


def test_roundtrip_reports_enlargement():
    g = subshift()
    report = ds.roundtrip_report(g, DSet({"v": FULL, "w": EMPTY}), subshift_table())
    (bad,) = report.failures()
    assert bad.name == "roundtrip w"
    assert bad.witness is not None


def test_roundtrip_holds_for_invariant_dset():
    g = subshift()
    table = subshift_table()
    d = DSet({"v": BOX, "w": FULL})
    assert ds.check_D1(g, d).passed and ds.check_D2(g, d).passed
    assert ds.roundtrip(g, d, table)
    a = ds.alpha(g, d, table)
    assert tg.equal(a.fibers["[v]"], BOX) and tg.is_full(a.fibers["[w]"])


def test_delta_rejects_unknown_classes():
    with pytest.raises(InputError):
        ds.delta(subshift(), ClassFibers({"[z]": FULL}), subshift_table())


def test_meet_and_join():
    d = DSet({"v": BOX, "w": FULL})
    assert same(ds.dset_meet(d, ds.constant(subshift(), FULL)), d)
    assert same(ds.dset_join(d, d), d)
    with pytest.raises(InputError):
        ds.dset_meet(d, DSet({"v": BOX}))


GRID = [TorusPoint((Fraction(2 * i + 1, 8), Fraction(2 * j + 1, 8))) for i in range(4) for j in range(4)]


def _random_fiber(rng):
    roll = rng.random()
    if roll < 0.2:
        return EMPTY
    if roll < 0.4:
        return FULL
    x0, x1 = sorted(rng.sample(range(5), 2))
    y0, y1 = sorted(rng.sample(range(5), 2))
    return tg.box((Fraction(x0, 4), Fraction(y0, 4)), (Fraction(x1, 4), Fraction(y1, 4)))


def _d1_oracle(g, d):
    return all(tg.member(z, d.fibers[e.source]) or not tg.member(z, d.fibers[e.range])
               for e in g.edges for z in GRID)


def _d2_oracle(g, d):
    for v, color in itertools.product(g.vertices, (Color.BLUE, Color.RED)):
        for z in GRID:
            below = all(tg.member(z, d.fibers[e.source]) for e in g.edges_into(v, color))
            if below and not tg.member(z, d.fibers[v]):
                return False
    return True


# centres of the sixteenth squares: never on a quarter line or a quarter diagonal
FINE = [TorusPoint((Fraction(2 * i + 1, 16), Fraction(2 * j + 1, 16))) for i in range(8) for j in range(8)]
EIGHTHS = [Fraction(n, 8) for n in range(8)]


def _annihilator_sample(lattice):
    finite = zk.annihilator_points(lattice)
    directions = zk.annihilator_directions(lattice)
    if not directions:
        return finite
    if len(directions) == 2:
        return [TorusPoint((s, t)) for s in EIGHTHS for t in EIGHTHS]
    c = directions[0]
    return [zk.translate(a, TorusPoint((t * c[0], t * c[1]))) for a in finite for t in EIGHTHS]


def _d3_oracle(table, d):
    for i, cls in enumerate(table.classes):
        for v in sorted(cls.trace):
            for cell in tg.cells(d.fibers[v]):
                inside = [p for p in FINE if tg.member(p, cell)]
                for j in table.acc.get(i, [i]):
                    shifts = _annihilator_sample(table.shared(i, j))
                    grown = {zk.translate(p, a) for p in inside for a in shifts}
                    if not any(all(tg.member(q, d.fibers[w]) for q in grown)
                               for w in sorted(table.classes[j].trace)):
                        return False
    return True


@pytest.mark.parametrize("graph,table", [
    (subshift, subshift_table),
    (lambda: xtype(4), None),
    (torus, None),
    (s1, s1_table),
])
def test_D_conditions_match_grid_oracle(graph, table):
    g = graph()
    table = table() if table else kg.class_table(g)
    rng = random.Random(3)
    for _ in range(25):
        d = DSet({v: _random_fiber(rng) for v in g.vertices})
        d1, d2 = ds.check_D1(g, d).passed, ds.check_D2(g, d).passed
        assert d1 == _d1_oracle(g, d)
        assert d2 == _d2_oracle(g, d)
        assert ds.check_D3(g, d, table).passed == _d3_oracle(table, d)
        if d1 and d2:
            assert ds.roundtrip(g, d, table)


def test_meet_and_join_keep_D1_and_D2():
    rng = random.Random(9)
    g = subshift()
    found = []
    while len(found) < 4:
        d = DSet({v: _random_fiber(rng) for v in g.vertices})
        if ds.check_D1(g, d).passed and ds.check_D2(g, d).passed:
            found.append(d)
    for d1, d2 in itertools.combinations(found, 2):
        for combined in (ds.dset_meet(d1, d2), ds.dset_join(d1, d2)):
            assert ds.check_D1(g, combined).passed
            assert ds.check_D2(g, combined).passed
            assert ds.roundtrip(g, combined, subshift_table())


def test_from_class_fibers_reads_expressions():
    g = subshift()
    d = ds.from_class_fibers(g, {"[v]": "BOX(1/8,3/8; 1/8,3/8)", "[w]": FULL}, subshift_table())
    assert same(d, DSet({"v": BOX, "w": FULL}))
    with pytest.raises(InputError):
        ds.from_class_fibers(g, {"[v]": "BOX(0,1/2)", "[w]": FULL}, subshift_table())
