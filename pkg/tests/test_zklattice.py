import itertools
import random
from fractions import Fraction

import pytest

from primcalc.models.lattice import SymbolicSequence, TorusPoint
from primcalc.services import zklattice as zk
from primcalc.utils.error_handling import InputError


def brute_span(gens, box):
    """Integer combinations of gens with coefficients in [-box, box]."""
    k = len(gens[0])
    out = set()
    for coeffs in itertools.product(range(-box, box + 1), repeat=len(gens)):
        out.add(tuple(sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(k)))
    return out


def random_lattice(rng, k, full=False):
    count = k + rng.randint(0, 2) if full else rng.randint(0, k + 1)
    while True:
        gens = [tuple(rng.randint(-4, 4) for _ in range(k)) for _ in range(count)]
        lat = zk.canonicalize(gens, k)
        if not full or lat.rank == k:
            return gens, lat


def test_canonicalize_examples():
    assert zk.canonicalize([], 2).rank == 0
    assert zk.canonicalize([(1, 0), (0, 1)]).basis == ((1, 0), (0, 1))
    assert zk.canonicalize([(2, 2), (0, 4), (2, -2)]).basis == ((2, 2), (0, 4))


def test_canonicalize_span_matches_brute_force():
    lat = zk.canonicalize([(2, 2), (0, 4), (2, -2)])
    inside = {v for v in brute_span([(2, 2), (0, 4), (2, -2)], 6) if max(map(abs, v)) <= 8}
    for v in itertools.product(range(-8, 9), repeat=2):
        assert zk.member(v, lat) == (v in inside)


def test_canonicalize_rejects_mismatched_lengths():
    with pytest.raises(InputError):
        zk.canonicalize([(1, 0), (1, 0, 0)])


def test_canonicalize_idempotent_and_order_independent():
    rng = random.Random(7)
    for _ in range(60):
        k = rng.randint(1, 4)
        gens, lat = random_lattice(rng, k)
        shuffled = gens[:]
        rng.shuffle(shuffled)
        assert zk.canonicalize(shuffled, k) == lat
        assert zk.canonicalize(lat.basis, k) == lat


def test_member_against_brute_force():
    rng = random.Random(11)
    for _ in range(20):
        gens, lat = random_lattice(rng, 2)
        if not gens:
            continue
        span = brute_span(gens, 4)
        for v in span:
            assert zk.member(v, lat)
    assert not zk.member((1, 1), zk.canonicalize([(2, 0), (0, 2)]))


def test_meet_and_join():
    z2 = zk.full_lattice(2)
    lat = zk.canonicalize([(2, 2), (0, 4)])
    assert zk.meet(z2, lat) == lat
    j = zk.join(zk.canonicalize([(1, 1)]), zk.canonicalize([(1, -1)]))
    for v in itertools.product(range(-5, 6), repeat=2):
        assert zk.member(v, j) == ((v[0] + v[1]) % 2 == 0)
    m = zk.meet(zk.canonicalize([(2, 0), (0, 1)]), zk.canonicalize([(1, 0), (0, 3)]))
    assert m == zk.canonicalize([(2, 0), (0, 3)])


def test_meet_random_membership():
    rng = random.Random(3)
    for _ in range(30):
        _, l1 = random_lattice(rng, 2)
        _, l2 = random_lattice(rng, 2)
        m = zk.meet(l1, l2)
        for v in itertools.product(range(-6, 7), repeat=2):
            assert zk.member(v, m) == (zk.member(v, l1) and zk.member(v, l2))


def test_rank_mismatch():
    with pytest.raises(InputError):
        zk.join(zk.full_lattice(1), zk.full_lattice(2))


@pytest.mark.parametrize("gens,expected", [
    ([(1, 0), (0, 1)], [(1, 0), (0, 1)]),
    ([(1, 1), (1, -1)], [(2, 0), (1, 1)]),
    ([(3,)], [(3,)]),
])
def test_positive_minimal_generators_examples(gens, expected):
    assert zk.positive_minimal_generators(zk.canonicalize(gens)) == expected


def _is_minimal(m, lat):
    for v in itertools.product(*(range(x + 1) for x in m)):
        if any(v) and v != m and zk.member(v, lat):
            return False
    return True


def test_positive_minimal_generators_random():
    rng = random.Random(2024)
    for _ in range(200):
        k = rng.randint(1, 3)
        _, lat = random_lattice(rng, k, full=True)
        mins = zk.positive_minimal_generators(lat)
        assert len(mins) == k
        for i, m in enumerate(mins):
            assert all(x >= 0 for x in m)
            assert m[i] > 0 and not any(m[i + 1:])
            assert zk.member(m, lat)
            assert _is_minimal(m, lat)
        assert zk.canonicalize(mins, k) == lat


def test_positive_minimal_generators_needs_full_rank():
    with pytest.raises(InputError):
        zk.positive_minimal_generators(zk.canonicalize([(1, 1)]))


def test_annihilator_chart_reconstructs_lattice():
    rng = random.Random(5)
    for _ in range(30):
        k = rng.randint(1, 3)
        _, lat = random_lattice(rng, k)
        chart = zk.annihilator_chart(lat)
        gens = [tuple(d * x for x in chart.column(i)) for i, d in enumerate(chart.divisors)]
        assert zk.canonicalize(gens, k) == lat
        assert chart.free_rank == k - lat.rank


def test_in_annihilator_examples():
    assert zk.in_annihilator(TorusPoint.of("1/2", 0), zk.canonicalize([(2, 0), (0, 1)]))
    z2 = zk.full_lattice(2)
    assert zk.in_annihilator(TorusPoint.of(0, 0), z2)
    assert not zk.in_annihilator(TorusPoint.of("1/3", 0), z2)
    z = TorusPoint.of("1/5", "2/7")
    assert zk.quotient_equal(z, z, zk.canonicalize([(1, 2)]))


def test_annihilator_points_have_quotient_order():
    lat = zk.canonicalize([(2, 0), (0, 3)])
    pts = zk.annihilator_points(lat)
    assert len(pts) == zk.index(lat) == 6
    assert zk.invariant_factors(lat) == (6,)
    assert zk.invariant_factors(zk.canonicalize([(2, 2)], 2)) == (2,)
    assert zk.invariant_factors(zk.full_lattice(2)) == ()
    assert all(zk.in_annihilator(p, lat) for p in pts)


def test_duality_on_rational_points():
    lat = zk.canonicalize([(2, 2), (0, 4)])
    for a, b in itertools.product(range(8), repeat=2):
        z = TorusPoint.of(Fraction(a, 8), Fraction(b, 8))
        expected = all((h[0] * z.angles[0] + h[1] * z.angles[1]).denominator == 1
                       for h in lat.basis)
        assert zk.in_annihilator(z, lat) == expected


def test_coset_representatives_are_distinct_classes():
    lat = zk.canonicalize([(2, 2), (0, 4)])
    reps = list(zk.coset_representatives(lat))
    assert len(reps) == 8 and reps[0] == (0, 0)
    for a, b in itertools.combinations(reps, 2):
        assert not zk.member(tuple(x - y for x, y in zip(a, b)), lat)


def test_converges_along():
    z = TorusPoint.of("1/3")
    z1 = zk.full_lattice(1)
    assert zk.converges_along(SymbolicSequence([], [(z, z1)]), z)
    half = zk.canonicalize([(2,)])
    assert not zk.converges_along(SymbolicSequence([], [(TorusPoint.of("1/4"), z1)]), z)
    shifted = z + TorusPoint.of("1/2")
    assert zk.converges_along(SymbolicSequence([(TorusPoint.of(0), z1)], [(shifted, half)]), z)
    with pytest.raises(InputError):
        zk.converges_along(SymbolicSequence([(z, z1)], []), z)
