from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_decomp

from ..models.lattice import (
    AdaptedChart,
    IntLattice,
    SymbolicSequence,
    TorusPoint,
    Vector,
    as_vectors,
)
from ..utils.error_handling import InputError, get_logger


logger = get_logger()


def _check_lengths(generators: Sequence[Vector], k: int) -> None:
    for g in generators:
        if len(g) != k:
            raise InputError(f"vector {g} has length {len(g)}, expected {k}")


def _column_hnf(generators: Sequence[Vector], k: int) -> List[Vector]:
    """Column-style HNF of the generators (sympy / Cohen convention).

    Returns the nonzero HNF columns b_0, b_1, ... where b_j has its positive
    pivot at coordinate p_j, zeros below it, and p_0 < p_1 < ...
    Zero columns pad the matrix so every coordinate row is processed.
    """
    cols = [list(g) for g in generators if any(g)]
    if not cols:
        return []
    cols.extend([[0] * k for _ in range(k)])
    m = Matrix(k, len(cols), lambda i, j: cols[j][i])
    w = hermite_normal_form(m)
    out = []
    for j in range(w.cols):
        col = tuple(int(w[i, j]) for i in range(k))
        if any(col):
            out.append(col)
    return out


def _pivot(row: Vector) -> int:
    for i, x in enumerate(row):
        if x:
            return i
    return -1


def canonicalize(generators: Iterable[Sequence[int]], k: Optional[int] = None) -> IntLattice:
    """Row Hermite normal form of span_Z(generators) with leading positive pivots."""
    vecs = as_vectors(generators)
    if k is None:
        if not vecs:
            raise InputError("ambient rank required for an empty generator list")
        k = len(vecs[0])
    _check_lengths(vecs, k)
    reversed_cols = _column_hnf([v[::-1] for v in vecs], k)
    rows = sorted((c[::-1] for c in reversed_cols), key=_pivot)
    return IntLattice(k, tuple(rows))


def zero_lattice(k: int) -> IntLattice:
    return IntLattice(k, ())


def full_lattice(k: int) -> IntLattice:
    return canonicalize([tuple(int(i == j) for j in range(k)) for i in range(k)], k)


def rank(lattice: IntLattice) -> int:
    return lattice.rank


def _same_rank(*lattices: IntLattice) -> int:
    ks = {l.ambient_rank for l in lattices}
    if len(ks) != 1:
        raise InputError(f"ambient-rank mismatch: {sorted(ks)}")
    return ks.pop()


def member(h: Sequence[int], lattice: IntLattice) -> bool:
    """Decide h in L by reduction against the echelon basis."""
    if len(h) != lattice.ambient_rank:
        raise InputError(f"vector {tuple(h)} not in Z^{lattice.ambient_rank}")
    rest = [int(x) for x in h]
    for row in lattice.basis:
        p = _pivot(row)
        if any(rest[:p]):
            return False
        q, r = divmod(rest[p], row[p])
        if r:
            return False
        rest = [a - q * b for a, b in zip(rest, row)]
    return not any(rest)


def join(l1: IntLattice, l2: IntLattice) -> IntLattice:
    k = _same_rank(l1, l2)
    return canonicalize(list(l1.basis) + list(l2.basis), k)


def meet(l1: IntLattice, l2: IntLattice) -> IntLattice:
    """Intersection via the integer left kernel of [B1; -B2]."""
    k = _same_rank(l1, l2)
    if l1.is_zero or l2.is_zero:
        return zero_lattice(k)
    r1 = l1.rank
    rows = [list(r) for r in l1.basis] + [[-x for x in r] for r in l2.basis]
    m = Matrix(rows)
    d, s, _ = smith_normal_decomp(m)
    nonzero = sum(1 for i in range(min(d.rows, d.cols)) if d[i, i] != 0)
    gens = []
    for i in range(nonzero, s.rows):
        a = [int(s[i, j]) for j in range(r1)]
        gens.append(tuple(
            sum(a[j] * l1.basis[j][c] for j in range(r1)) for c in range(k)
        ))
    return canonicalize(gens, k)


def equal(l1: IntLattice, l2: IntLattice) -> bool:
    _same_rank(l1, l2)
    return l1.basis == l2.basis


def is_sublattice(l1: IntLattice, l2: IntLattice) -> bool:
    _same_rank(l1, l2)
    return all(member(h, l2) for h in l1.basis)


def positive_minimal_generators(lattice: IntLattice) -> List[Vector]:
    """Minimal positive generators m^1..m^k with m^i in N^i minus N^(i-1).

    m^1 is the smallest positive element on the first axis; m^i is the
    minimal element of the coset {x in L : x_i = d_i, x_j = 0 for j > i},
    obtained by reducing the HNF column b_(i-1) top-down against m^(i-1)..m^1.
    """
    k = lattice.ambient_rank
    if lattice.rank != k:
        raise InputError(f"positive generators need a full-rank lattice, rank is {lattice.rank} < {k}")
    cols = _column_hnf(list(lattice.basis), k)
    mins: List[List[int]] = []
    for i, col in enumerate(cols):
        x = list(col)
        for j in range(i - 1, -1, -1):
            q = x[j] // mins[j][j]
            if q:
                x = [a - q * b for a, b in zip(x, mins[j])]
        mins.append(x)
    logger.debug("positive minimal generators of %s: %s", lattice, mins)
    return [tuple(m) for m in mins]


def smith_data(lattice: IntLattice) -> Tuple[Matrix, Matrix, Matrix]:
    """(D, S, T) with S * M * T = D for M the basis as columns."""
    k = lattice.ambient_rank
    m = Matrix(k, lattice.rank, lambda i, j: lattice.basis[j][i])
    return smith_normal_decomp(m)


def annihilator_chart(lattice: IntLattice) -> AdaptedChart:
    """Unimodular coordinates diagonalizing L."""
    k = lattice.ambient_rank
    if lattice.is_zero:
        ident = tuple(tuple(int(i == j) for j in range(k)) for i in range(k))
        return AdaptedChart(ident, (), k, ident)
    d, s, _ = smith_data(lattice)
    p = s.inv()
    divisors = []
    for i in range(lattice.rank):
        di = int(d[i, i])
        if di < 0:
            p[:, i] = -p[:, i]
            di = -di
        divisors.append(di)
    dual = p.inv().T
    transform = tuple(tuple(int(p[i, j]) for j in range(k)) for i in range(k))
    dual_rows = tuple(tuple(int(dual[i, j]) for j in range(k)) for i in range(k))
    return AdaptedChart(transform, tuple(divisors), k - lattice.rank, dual_rows)


def invariant_factors(lattice: IntLattice) -> Tuple[int, ...]:
    """Invariant factors of the torsion part of Z^k / L (ones dropped)."""
    return tuple(d for d in annihilator_chart(lattice).divisors if d != 1)


def index(lattice: IntLattice) -> int:
    """|Z^k / L| for a full-rank lattice."""
    if not lattice.is_full:
        raise InputError("index is infinite for a rank-deficient lattice")
    out = 1
    for d in annihilator_chart(lattice).divisors:
        out *= d
    return out


def character(z: TorusPoint, h: Sequence[int]) -> Fraction:
    """Angle of z^h, i.e. h . theta mod 1."""
    if len(h) != z.dimension:
        raise InputError(f"character {tuple(h)} does not match T^{z.dimension}")
    return sum((Fraction(a) * b for a, b in zip(h, z.angles)), Fraction(0)) % 1


def translate(z: TorusPoint, w: TorusPoint) -> TorusPoint:
    """The product zw in T^k."""
    if z.dimension != w.dimension:
        raise InputError(f"cannot multiply points of T^{z.dimension} and T^{w.dimension}")
    return z + w


def conj(z: TorusPoint) -> TorusPoint:
    return -z


def in_annihilator(z: TorusPoint, lattice: IntLattice) -> bool:
    if z.dimension != lattice.ambient_rank:
        raise InputError(f"point {z} does not match Z^{lattice.ambient_rank}")
    return all(character(z, h) == 0 for h in lattice.basis)


def quotient_equal(z1: TorusPoint, z2: TorusPoint, lattice: IntLattice) -> bool:
    return in_annihilator(z1 - z2, lattice)


def annihilator_points(lattice: IntLattice) -> List[TorusPoint]:
    """The finite part of the annihilator: sums of the chart's torsion generators."""
    chart = annihilator_chart(lattice)
    k = lattice.ambient_rank
    gens = [
        (chart.dual_column(i), d)
        for i, d in enumerate(chart.divisors) if d > 1
    ]
    points = set()
    for coeffs in itertools.product(*(range(d) for _, d in gens)):
        theta = [Fraction(0)] * k
        for c, (col, d) in zip(coeffs, gens):
            for j in range(k):
                theta[j] += Fraction(c * col[j], d)
        points.add(TorusPoint(tuple(theta)))
    return sorted(points, key=lambda p: p.angles)


def annihilator_directions(lattice: IntLattice) -> List[Vector]:
    """Primitive integer directions of the connected part of the annihilator."""
    chart = annihilator_chart(lattice)
    r = len(chart.divisors)
    return [chart.dual_column(i) for i in range(r, chart.ambient_rank)]


def coset_representatives(lattice: IntLattice, bound: int = 2) -> Iterator[Vector]:
    """Representatives of Z^k / L, smallest height first, then lexicographic.

    Pivot coordinates range over [0, pivot); free coordinates over
    [-bound, bound].
    """
    k = lattice.ambient_rank
    pivots = {_pivot(row): row[_pivot(row)] for row in lattice.basis}
    ranges = []
    for c in range(k):
        if c in pivots:
            ranges.append(range(pivots[c]))
        else:
            ranges.append(range(-bound, bound + 1))
    reps = list(itertools.product(*ranges))
    reps.sort(key=lambda v: (max((abs(x) for x in v), default=0), v))
    return iter(reps)


def converges_along(seq: SymbolicSequence, z: TorusPoint) -> bool:
    """Eventually periodic rational data: every tail pair must match z modulo H."""
    if not seq.tail:
        raise InputError("convergence needs a nonempty periodic tail")
    return all(quotient_equal(zn, z, h) for zn, h in seq.tail)
