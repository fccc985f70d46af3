import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from primcalc.models.graph import DirGraph, Edge, PathPoint
from primcalc.models.kgraph import KPath
from primcalc.models.lattice import TorusPoint
from primcalc.models.repsim import OrbitElement
from primcalc.services import bisect
from primcalc.services import repsim as rs
from primcalc.services import zklattice as zk
from primcalc.utils.error_handling import InputError


def dumbbell():
    return DirGraph("dumbbell", ["v", "w"],
                    [Edge("e", "v", "v"), Edge("f", "v", "w"), Edge("g", "w", "w")])


def loops():
    return DirGraph("twoloops", ["v"], [Edge("a", "v", "v"), Edge("b", "v", "v")])


def epath(n, v="v"):
    return KPath(("e",) * n, (), v, v)


E_INF = PathPoint((), ("e",))
G_INF = PathPoint((), ("g",))
Z1 = zk.full_lattice(1)
ZERO1 = zk.zero_lattice(1)


def test_constant_bump_series():
    series = rs.fourier(rs.constant_bump(1), bound=8, grid=64)
    assert abs(series.coefficient((0,)) - 1) < 1e-12
    assert all(abs(c) < 1e-12 for h, c in series.coefficients.items() if h != (0,))
    lattice = zk.canonicalize([[3]], 1)
    averaged = rs.average(series, lattice)
    assert abs(rs.reconstruct(averaged, [0.3]) - rs.reconstruct(series, [0.3])) < 1e-12


def test_perturb_by_zero_is_identity():
    series = rs.fourier(rs.smooth_bump(["1/8"], ["5/8"]), bound=8, grid=64)
    assert rs.perturb(series, (0,)).coefficients == series.coefficients


def test_perturb_matches_fft_of_modulated_samples():
    psi = rs.smooth_bump(["1/8"], ["5/8"])
    grid, bound, h0 = 256, 16, (3,)
    series = rs.fourier(psi, bound=bound, grid=grid)
    theta = np.arange(grid) / grid
    modulated = rs.sample(psi, grid) * np.exp(2j * np.pi * h0[0] * theta)
    direct = rs.fourier_samples(modulated, bound)
    shifted = rs.perturb(series, h0)
    for (h,), c in direct.coefficients.items():
        if abs(h - h0[0]) <= bound:
            assert abs(c - shifted.coefficient((h,))) < 1e-8


def test_reconstruction_within_tail():
    psi = rs.smooth_bump(["1/8", "0"], ["5/8", "1/2"])
    series = rs.fourier(psi, bound=24, grid=1024)
    rng = random.Random(5)
    for _ in range(64):
        z = TorusPoint.of(Fraction(rng.randrange(97), 97), Fraction(rng.randrange(89), 89))
        assert abs(rs.reconstruct(series, z) - rs.evaluate(psi, z)) <= 1e-6 + series.tail


def test_average_is_a_projection():
    series = rs.fourier(rs.smooth_bump(["0", "1/4"], ["1/2", "3/4"]), bound=6, grid=64)
    lattice = zk.canonicalize([[1, -1], [0, 2]], 2)
    once = rs.average(series, lattice)
    assert rs.average(once, lattice).coefficients == once.coefficients
    assert all(once.coefficients[h] == series.coefficients[h] for h in once.coefficients)
    assert all(zk.member(h, lattice) for h in once.coefficients)


def test_bound_needs_resolution():
    with pytest.raises(InputError):
        rs.fourier(rs.constant_bump(1), bound=40, grid=64)


def test_find_h0_whole_group():
    psi = rs.smooth_bump(["1/8"], ["5/8"])
    series = rs.fourier(psi, bound=24, grid=512)
    assert rs.find_h0(series, TorusPoint.of("3/8"), Z1) == (0,)


def test_find_h0_on_a_column_lattice():
    psi = rs.smooth_bump(["7/8", "7/8"], ["1/8", "1/8"])
    series = rs.fourier(psi, bound=12, grid=256)
    z = TorusPoint.zero(2)
    column = zk.canonicalize([[0, 1]], 2)
    h0 = rs.find_h0(series, z, column)
    total = rs.character_sum(rs.perturb(series, h0), z, column)
    direct = sum(series.coefficient((-h0[0], t)) for t in range(-12, 13))
    assert abs(total) > 1e-6
    assert abs(total - direct) < 1e-9


def test_find_h0_needs_nonvanishing_bump():
    series = rs.fourier(rs.smooth_bump(["1/8"], ["3/8"]), bound=16, grid=256)
    with pytest.raises(InputError):
        rs.find_h0(series, TorusPoint.of("3/4"), Z1)


def test_cond_expectation_filters_degrees():
    g = dumbbell()
    f = rs.cc_function(g, [
        (epath(0), epath(1), 1),
        (epath(1), epath(1), 2),
        (epath(2), epath(0), 3),
    ])
    assert f.degrees() == [(-1,), (0,), (2,)]
    assert rs.cond_expectation(f, zk.canonicalize([[2]], 1)).degrees() == [(0,), (2,)]
    assert rs.cond_expectation(f, Z1).terms == f.terms
    assert rs.cond_expectation(f, ZERO1).degrees() == [(0,)]
    twice = rs.cond_expectation(rs.cond_expectation(f, zk.canonicalize([[2]], 1)), zk.canonicalize([[2]], 1))
    assert twice.terms == rs.cond_expectation(f, zk.canonicalize([[2]], 1)).terms


def test_orbit_of_a_fixed_loop():
    orb = rs.orbit(dumbbell(), E_INF, radius=2)
    assert sorted(xi.lag for xi in orb.elements) == [(-2,), (-1,), (0,), (1,), (2,)]
    assert {xi.point for xi in orb.elements} == {E_INF}
    assert len(rs.classes(orb, zk.canonicalize([[2]], 1))) == 2
    assert len(rs.classes(orb, Z1)) == 1
    with pytest.raises(InputError):
        rs.orbit(dumbbell(), E_INF, radius=9)


def test_orbit_classes_split_points():
    orb = rs.orbit(dumbbell(), G_INF, radius=2)
    points = {xi.point for xi in orb.elements}
    assert PathPoint(("f",), ("g",)) in points
    assert len(rs.classes(orb, Z1)) == len(points)


def test_rep_entry_of_unit_cylinder():
    f = rs.cc_function(dumbbell(), [(epath(1), epath(1), 1)])
    unit = OrbitElement(E_INF, (0,))
    assert abs(rs.rep_entry(f, Z1, E_INF, TorusPoint.of("1/3"), unit, unit) - 1) < 1e-12


def test_rep_entry_of_the_loop_atom():
    f = rs.cc_function(dumbbell(), [(epath(1), epath(0), 1)])
    unit = OrbitElement(E_INF, (0,))
    z = TorusPoint.of("1/3")
    assert abs(rs.rep_entry(f, Z1, E_INF, z, unit, unit) - cmath.exp(2j * math.pi / 3)) < 1e-12
    assert rs.rep_entry(f, zk.canonicalize([[2]], 1), E_INF, z, unit, unit) == 0


def test_rep_entry_off_diagonal():
    f = rs.cc_function(dumbbell(), [(epath(1), epath(0), 1)])
    orb = rs.orbit(dumbbell(), E_INF, radius=2)
    z = TorusPoint.of("1/4")
    xi1, xi2 = OrbitElement(E_INF, (1,)), OrbitElement(E_INF, (0,))
    assert abs(rs.rep_entry(f, ZERO1, orb, z, xi1, xi2) - 1j) < 1e-12
    with pytest.raises(InputError):
        rs.rep_entry(f, ZERO1, orb, z, OrbitElement(E_INF, (5,)), xi2)


def test_urysohn_for_an_aperiodic_tail():
    g = loops()
    family = bisect.graph_family(g, ["v"])
    phi = [KPath(bisect.canonical(family.base).word(1), (), "v", "v")]
    psi = rs.constant_bump(1)
    f, report = rs.urysohn(family, phi, psi, series=rs.fourier(psi, bound=4, grid=64))
    assert report.passed
    assert len(f.terms) == 1
    atom, weight = f.terms[0]
    assert atom.lam == atom.rho == phi[0]
    assert abs(weight - 1) < 1e-12


def test_urysohn_on_the_dumbbell_cycle():
    g = dumbbell()
    family = bisect.graph_family(g, ["v"])
    psi = rs.smooth_bump(["1/8"], ["5/8"])
    series = rs.fourier(psi, bound=24, grid=512)
    f, report = rs.urysohn(family, [epath(1)], psi, series=series, away=[G_INF])
    assert report.passed
    assert report.notes['h0'] == [0]
    diagonal = [c for c in report.checks if c.name.startswith("diagonal")]
    assert diagonal and all(c.value > 1e-6 for c in diagonal)
    assert any(c.name.startswith(f"vanishes at ({G_INF}") for c in report.checks)
    assert any("1/16" in c.name or "15/16" in c.name for c in report.checks)


def test_urysohn_rejects_phi_missing_the_base():
    g = dumbbell()
    family = bisect.graph_family(g, ["v"])
    psi = rs.constant_bump(1)
    with pytest.raises(InputError):
        rs.urysohn(family, [KPath(("f",), (), "v", "w")], psi, series=rs.fourier(psi, bound=2, grid=16))


def test_kernel_probe_zero_function():
    f = rs.cc_function(dumbbell(), [])
    report = rs.kernel_monotonicity_probe(zk.canonicalize([[2]], 1), Z1, [f], E_INF, TorusPoint.of("1/5"))
    assert report.passed


def _cancelling_fixture(rng, z):
    a, b = rng.randrange(4), rng.randrange(4)
    j = rng.choice([1, -1]) if a >= 2 else 1
    w = Fraction(rng.randrange(1, 9), rng.randrange(1, 5))
    # the second atom carries the degree shifted by 2j, weighted to cancel at z
    twist = cmath.exp(-2j * math.pi * float(zk.character(z, (2 * j,))))
    return rs.cc_function(dumbbell(), [
        (epath(a), epath(b), w),
        (epath(a + 2 * j), epath(b), complex(-w) * twist),
    ])


def test_kernel_probe_on_random_fixtures():
    rng = random.Random(20)
    z = TorusPoint.of("1/5")
    fixtures = [_cancelling_fixture(rng, z) for _ in range(20)]
    report = rs.kernel_monotonicity_probe(zk.canonicalize([[2]], 1), Z1, fixtures, E_INF, z, radius=3)
    assert report.passed
    assert len(report.checks) == 40


def test_kernel_probe_flags_non_kernel_fixtures():
    f = rs.cc_function(dumbbell(), [(epath(1), epath(0), 1)])
    report = rs.kernel_monotonicity_probe(zk.canonicalize([[2]], 1), Z1, [f], E_INF, TorusPoint.of("1/5"),
                                          radius=1)
    assert not report.passed
    assert [c.name for c in report.failures()] == ["fixture 0 kernel of pi^H1", "fixture 0 kernel of pi^H2"]


def test_kernel_probe_needs_nested_lattices():
    with pytest.raises(InputError):
        rs.kernel_monotonicity_probe(Z1, zk.canonicalize([[2]], 1), [], E_INF, TorusPoint.of("0"))


def test_generated_kernel_fixtures_cancel():
    z = TorusPoint.of("2/7")
    h1 = zk.canonicalize([[3]], 1)
    fixtures = rs.kernel_fixtures(dumbbell(), E_INF, h1, z, 6, random.Random(1))
    assert all(len(f.terms) == 2 for f in fixtures)
    assert all(f.degrees()[1][0] - f.degrees()[0][0] == 3 for f in fixtures)
    report = rs.kernel_monotonicity_probe(h1, Z1, fixtures, E_INF, z, radius=2)
    assert report.passed
    with pytest.raises(InputError):
        rs.kernel_fixtures(dumbbell(), E_INF, ZERO1, z, 1, random.Random(1))


def two_cycle():
    return DirGraph("twocycle", ["u", "v"], [Edge("a", "v", "u"), Edge("b", "u", "v")])


AB_INF = PathPoint((), ("a", "b"))


def test_point_isotropy_of_graph_points():
    assert zk.equal(bisect.point_isotropy(dumbbell(), E_INF), Z1)
    assert zk.equal(bisect.point_isotropy(two_cycle(), AB_INF), zk.canonicalize([[2]], 1))
    assert zk.equal(bisect.point_isotropy(loops(), PathPoint((), ("a",))), ZERO1)


def test_kernel_lattices_must_sit_in_the_isotropy():
    z = TorusPoint.of("1/5")
    base = PathPoint((), ("a",))
    two = zk.canonicalize([[2]], 1)
    with pytest.raises(InputError):
        rs.kernel_fixtures(loops(), base, two, z, 3, random.Random(1))
    f = rs.cc_function(loops(), [(KPath(("a",), (), "v", "v"), KPath((), (), "v", "v"), 1)])
    with pytest.raises(InputError):
        rs.kernel_monotonicity_probe(two, Z1, [f], base, z)
    # 4Z sits in 2Z but Z does not
    g = two_cycle()
    with pytest.raises(InputError):
        rs.kernel_fixtures(g, AB_INF, Z1, z, 1, random.Random(1))
    rs.kernel_fixtures(g, AB_INF, zk.canonicalize([[4]], 1), z, 1, random.Random(1))


@pytest.mark.parametrize("graph,base,pairs", [
    (dumbbell, E_INF, [(4, 2), (6, 3), (2, 1)]),
    (two_cycle, AB_INF, [(8, 4), (12, 6), (4, 2)]),
])
def test_kernel_monotonicity_on_nested_pairs(graph, base, pairs):
    g = graph()
    rng = random.Random(7)
    for n1, n2 in pairs:
        h1, h2 = zk.canonicalize([[n1]], 1), zk.canonicalize([[n2]], 1)
        z = TorusPoint.of(Fraction(rng.randrange(1, 12), 12))
        fixtures = rs.kernel_fixtures(g, base, h1, z, 4, rng)
        report = rs.kernel_monotonicity_probe(h1, h2, fixtures, base, z, radius=2)
        assert report.passed, [c.name for c in report.failures()]
        assert len(report.checks) == 8


def _random_lattice(rng, k):
    if k == 1:
        return zk.canonicalize([[rng.randrange(1, 7)]], 1)
    return zk.canonicalize([[rng.randrange(1, 4), rng.randrange(3)], [0, rng.randrange(1, 4)]], 2)


def test_find_h0_on_random_full_rank_lattices():
    rng = random.Random(11)
    for _ in range(50):
        k = rng.choice([1, 2])
        lo = [Fraction(rng.randrange(8), 8) for _ in range(k)]
        length = [Fraction(rng.randrange(3, 7), 8) for _ in range(k)]
        psi = rs.smooth_bump(lo, [a + b for a, b in zip(lo, length)])
        z = TorusPoint(tuple((a + b * Fraction(rng.randrange(1, 4), 4)) % 1 for a, b in zip(lo, length)))
        series = rs.fourier(psi, bound=24 if k == 1 else 12, grid=256 if k == 1 else 128)
        lattice = _random_lattice(rng, k)
        assert abs(rs.reconstruct(series, z)) > 0.1
        h0 = rs.find_h0(series, z, lattice)
        assert len(h0) == k
        assert abs(rs.character_sum(rs.perturb(series, h0), z, lattice)) > 1e-6


def _graph_paths(g, length):
    out = [KPath((), (), v, v) for v in g.vertices]
    frontier = list(out)
    for _ in range(length):
        frontier = [KPath(p.blue + (e.name,), (), p.range, e.source)
                    for p in frontier for e in sorted(g.edges_into(p.source), key=lambda e: e.name)]
        out.extend(frontier)
    return out


def _starts_with(g, path, y):
    n = len(path.blue)
    return y.word(n) == path.blue and g.edge(y.word(1)[0]).range == path.range


def _entry_by_arrows(g, terms, lattice, z, xi1, xi2):
    m = xi1.lag[0] - xi2.lag[0]
    total = 0j
    for lam, rho, w in terms:
        n = len(lam.blue) - len(rho.blue)
        if not zk.member((n - m,), lattice):
            continue
        y1, y2 = xi1.point, xi2.point
        if not (_starts_with(g, lam, y1) and _starts_with(g, rho, y2)):
            continue
        if bisect.canonical(y1.shift(len(lam.blue))) == bisect.canonical(y2.shift(len(rho.blue))):
            total += complex(w) * cmath.exp(2j * math.pi * n * float(z.angles[0]))
    return total


def test_rep_entry_matches_a_sum_over_arrows():
    g = dumbbell()
    paths = _graph_paths(g, 2)
    orb = rs.orbit(g, G_INF, radius=2)
    rng = random.Random(3)
    for _ in range(50):
        terms = []
        for _ in range(rng.randrange(1, 4)):
            lam = rng.choice(paths)
            rho = rng.choice([p for p in paths if p.source == lam.source])
            terms.append((lam, rho, Fraction(rng.randrange(-4, 5), rng.randrange(1, 4))))
        f = rs.cc_function(g, terms)
        lattice = rng.choice([ZERO1, zk.canonicalize([[2]], 1), Z1])
        z = TorusPoint.of(Fraction(rng.randrange(12), 12))
        for _ in range(12):
            xi1, xi2 = rng.choice(orb.elements), rng.choice(orb.elements)
            expected = _entry_by_arrows(g, terms, lattice, z, xi1, xi2)
            assert abs(rs.rep_entry(f, lattice, orb, z, xi1, xi2) - expected) < 1e-9
