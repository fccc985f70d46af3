from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from ..models.lattice import IntLattice, Rational, TorusPoint, to_fraction
from ..models.torus import Arc, ClosedSubgroupT, ConnectedPart, TorusSet
from ..utils import polygon as pg
from ..utils.error_handling import InputError, get_logger
from . import zklattice


logger = get_logger()

SQUARE_LINES = (
    (Fraction(1), Fraction(0), Fraction(0)),
    (Fraction(1), Fraction(0), Fraction(-1)),
    (Fraction(0), Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1), Fraction(-1)),
)


def _check_k(k: int) -> None:
    if k not in (1, 2):
        raise InputError(f"torus sets are supported for k in {{1,2}}, got k={k}")


def _same_k(*sets: TorusSet) -> int:
    ks = {s.dimension for s in sets}
    if len(ks) != 1:
        raise InputError(f"dimension mismatch: {sorted(ks)}")
    return ks.pop()


# construction

def empty(k: int) -> TorusSet:
    _check_k(k)
    return TorusSet(k, ())


def full(k: int) -> TorusSet:
    _check_k(k)
    if k == 1:
        return TorusSet(1, ((Fraction(0), Fraction(1)),))
    return TorusSet(2, (pg.UNIT_SQUARE,))


def _interval_pieces(lo: Fraction, hi: Fraction) -> List[Arc]:
    """Pieces of the open arc (lo, hi) inside [0,1]; hi < lo wraps."""
    if hi < lo:
        hi += 1
    if hi == lo:
        return []
    if hi - lo >= 1:
        return [(Fraction(0), Fraction(1))]
    a = lo % 1
    b = a + (hi - lo)
    if b <= 1:
        return [(a, b)]
    return [(a, Fraction(1)), (Fraction(0), b - 1)]


def from_arcs(arcs: Iterable[Arc]) -> TorusSet:
    """Canonical 1-d set: sorted, with touching or overlapping arcs merged."""
    items = sorted((Fraction(a), Fraction(b)) for a, b in arcs if a < b)
    merged: List[List[Fraction]] = []
    for a, b in items:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return TorusSet(1, tuple((a, b) for a, b in merged))


def from_polygons(polygons: Iterable[Sequence[Tuple[Fraction, Fraction]]]) -> TorusSet:
    atoms = []
    for poly in polygons:
        clipped = pg.clip(tuple(poly), pg.UNIT_SQUARE) if poly else None
        if clipped is not None and clipped not in atoms:
            atoms.append(clipped)
    return TorusSet(2, tuple(atoms))


def box(lo: Sequence[Rational], hi: Sequence[Rational]) -> TorusSet:
    """Product of open arcs (lo_j, hi_j); hi_j < lo_j wraps through 0."""
    if len(lo) != len(hi):
        raise InputError("box bounds have different lengths")
    k = len(lo)
    _check_k(k)
    pieces = [_interval_pieces(to_fraction(a), to_fraction(b)) for a, b in zip(lo, hi)]
    if k == 1:
        return from_arcs(pieces[0])
    return from_polygons(
        pg.rectangle(x0, x1, y0, y1) for x0, x1 in pieces[0] for y0, y1 in pieces[1]
    )


def polygon(vertices: Sequence[Tuple[Rational, Rational]]) -> TorusSet:
    """Open convex polygon given by its vertices, read inside the unit square."""
    pts = [pg.point(x, y) for x, y in vertices]
    hull = pg.convex_hull(pts)
    if hull is None:
        return empty(2)
    return from_polygons([hull])


# boolean algebra

def union(a: TorusSet, b: TorusSet) -> TorusSet:
    k = _same_k(a, b)
    if k == 1:
        return from_arcs(a.atoms + b.atoms)
    atoms = list(a.atoms)
    atoms.extend(p for p in b.atoms if p not in atoms)
    return TorusSet(2, tuple(atoms))


def union_all(sets: Iterable[TorusSet], k: int) -> TorusSet:
    out = empty(k)
    for s in sets:
        out = union(out, s)
    return out


def intersect(a: TorusSet, b: TorusSet) -> TorusSet:
    k = _same_k(a, b)
    if k == 1:
        return from_arcs(
            (max(a0, b0), min(a1, b1)) for a0, a1 in a.atoms for b0, b1 in b.atoms
        )
    atoms = []
    for p in a.atoms:
        for q in b.atoms:
            r = pg.clip(p, q)
            if r is not None and r not in atoms:
                atoms.append(r)
    return TorusSet(2, tuple(atoms))


def intersect_all(sets: Iterable[TorusSet], k: int) -> TorusSet:
    out = full(k)
    for s in sets:
        out = intersect(out, s)
    return out


def _lines_of(atoms) -> List[pg.Line]:
    seen = []
    for atom in atoms:
        for line in pg.edge_lines(atom):
            line = pg.normalize_line(line)
            if line not in seen:
                seen.append(line)
    return seen


def complement(a: TorusSet) -> TorusSet:
    """Regularized complement int(T^k minus a)."""
    k = a.dimension
    if k == 1:
        gaps = []
        prev = Fraction(0)
        for lo, hi in a.atoms:
            gaps.append((prev, lo))
            prev = hi
        gaps.append((prev, Fraction(1)))
        return from_arcs(gaps)
    cells = pg.refine(pg.UNIT_SQUARE, _lines_of(a.atoms))
    out = [c for c in cells if not any(pg.strictly_inside(pg.centroid(c), p) for p in a.atoms)]
    return TorusSet(2, tuple(out))


def subset(a: TorusSet, b: TorusSet) -> bool:
    """Exact inclusion of regularizations."""
    k = _same_k(a, b)
    if k == 1:
        return all(any(b0 <= a0 and a1 <= b1 for b0, b1 in b.atoms) for a0, a1 in a.atoms)
    for p in a.atoms:
        touching = [q for q in b.atoms if pg.clip(p, q) is not None]
        if not touching:
            return False
        for piece in pg.refine(p, _lines_of(touching)):
            c = pg.centroid(piece)
            if not any(pg.strictly_inside(c, q) for q in touching):
                return False
    return True


def equal(a: TorusSet, b: TorusSet) -> bool:
    k = _same_k(a, b)
    if k == 1:
        return a.atoms == b.atoms
    return subset(a, b) and subset(b, a)


def is_full(a: TorusSet) -> bool:
    return equal(a, full(a.dimension))


def cells(a: TorusSet) -> List[TorusSet]:
    """The convex atoms of a as separate sets (arcs glued through 0 stay together)."""
    if a.dimension == 1:
        arcs = list(a.atoms)
        if len(arcs) >= 2 and arcs[0][0] == 0 and arcs[-1][1] == 1:
            return [from_arcs([arcs[-1], arcs[0]])] + [from_arcs([x]) for x in arcs[1:-1]]
        return [from_arcs([x]) for x in arcs]
    return [TorusSet(2, (p,)) for p in a.atoms]


# membership

def _ray_order(u, v) -> int:
    def half(w):
        return 0 if (w[1] > 0 or (w[1] == 0 and w[0] > 0)) else 1
    hu, hv = half(u), half(v)
    if hu != hv:
        return hu - hv
    c = u[0] * v[1] - u[1] * v[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


def _sector_probes(q, lines) -> List[Tuple[Fraction, Fraction]]:
    """One probe point in every sector cut out around q by the lines through q."""
    through = [l for l in lines if pg.line_value(l, q) == 0]
    others = [l for l in lines if pg.line_value(l, q) != 0]
    if not through:
        return [q]
    rays = []
    for a, b, _ in through:
        for d in ((b, -a), (-b, a)):
            n = max(abs(d[0]), abs(d[1]))
            d = (d[0] / n, d[1] / n)
            if d not in rays:
                rays.append(d)
    rays.sort(key=functools.cmp_to_key(_ray_order))
    probes = []
    for i, r in enumerate(rays):
        s = rays[(i + 1) % len(rays)]
        if r[0] * s[1] - r[1] * s[0] > 0:
            d = (r[0] + s[0], r[1] + s[1])
        else:
            d = (-r[1], r[0])
        scale = abs(d[0]) + abs(d[1])
        eps = min(
            abs(pg.line_value(l, q)) / (2 * (abs(l[0]) + abs(l[1])) * scale)
            for l in others
        )
        probes.append((q[0] + eps * d[0], q[1] + eps * d[1]))
    return probes


def member(z: TorusPoint, a: TorusSet) -> bool:
    """theta in the regular open set a."""
    if z.dimension != a.dimension:
        raise InputError(f"point {z} does not match T^{a.dimension}")
    if a.dimension == 1:
        t = z.angles[0]
        if any(lo < t < hi for lo, hi in a.atoms):
            return True
        return t == 0 and bool(a.atoms) and a.atoms[0][0] == 0 and a.atoms[-1][1] == 1
    x, y = z.angles
    if 0 < x and 0 < y and any(pg.strictly_inside((x, y), p) for p in a.atoms):
        return True
    lines = list(SQUARE_LINES) + _lines_of(a.atoms)
    for i in (0, 1):
        if i and x != 0:
            continue
        for j in (0, 1):
            if j and y != 0:
                continue
            q = (x + i, y + j)
            for p in _sector_probes(q, lines):
                if 0 < p[0] < 1 and 0 < p[1] < 1:
                    if not any(pg.strictly_inside(p, atom) for atom in a.atoms):
                        return False
    return True


def sample_points(a: TorusSet, limit: int = 16) -> List[TorusPoint]:
    """Rational interior points of a, one per atom."""
    pts = []
    for atom in a.atoms[:limit]:
        if a.dimension == 1:
            pts.append(TorusPoint.of((atom[0] + atom[1]) / 2))
        else:
            pts.append(TorusPoint(pg.centroid(atom)))
    return pts


# annihilators and saturation

def subgroup_of(lattice: IntLattice) -> ClosedSubgroupT:
    """The annihilator of L as a geometric subgroup of T^k."""
    k = lattice.ambient_rank
    _check_k(k)
    points = tuple(zklattice.annihilator_points(lattice))
    directions = zklattice.annihilator_directions(lattice)
    if not directions:
        return ClosedSubgroupT(k, points, ConnectedPart.TRIVIAL, None)
    if len(directions) == k:
        return ClosedSubgroupT(k, (TorusPoint.zero(k),), ConnectedPart.FULL, None)
    c = directions[0]
    if c[0] < 0 or (c[0] == 0 and c[1] < 0):
        c = tuple(-x for x in c)
    return ClosedSubgroupT(k, points, ConnectedPart.CIRCLE, c)


def _translate_arcs(arcs, s: Fraction) -> List[Arc]:
    out = []
    for lo, hi in arcs:
        out.extend(_interval_pieces(lo + s, hi + s))
    return out


def _unfold(poly) -> List[pg.Polygon]:
    x0, x1, y0, y1 = pg.bbox(poly)
    out = []
    for i in range(math.floor(x0), math.ceil(x1)):
        for j in range(math.floor(y0), math.ceil(y1)):
            piece = pg.clip(pg.translate(poly, -i, -j), pg.UNIT_SQUARE)
            if piece is not None:
                out.append(piece)
    return out


def saturate(w: TorusSet, lattice: IntLattice) -> TorusSet:
    """W . L^perp: translates by the finite part, swept along the circle part."""
    k = w.dimension
    if lattice.ambient_rank != k:
        raise InputError(f"lattice in Z^{lattice.ambient_rank} cannot act on T^{k}")
    if w.is_empty:
        return w
    group = subgroup_of(lattice)
    if group.connected is ConnectedPart.FULL:
        return full(k)
    if k == 1:
        arcs = []
        for s in group.points:
            arcs.extend(_translate_arcs(w.atoms, s.angles[0]))
        return from_arcs(arcs)
    polys = []
    for s in group.points:
        for atom in w.atoms:
            moved = pg.translate(atom, *s.angles)
            if group.connected is ConnectedPart.CIRCLE:
                c = group.direction
                moved = pg.convex_hull(moved + pg.translate(moved, c[0], c[1]))
            polys.extend(_unfold(moved))
    logger.debug("saturated %d atoms by %s into %d atoms", len(w.atoms), lattice, len(polys))
    return from_polygons(polys)


def is_invariant(w: TorusSet, lattice: IntLattice) -> bool:
    return equal(saturate(w, lattice), w)


# rendering

def _fmt(x: Fraction) -> str:
    return str(x)


def render(a: TorusSet) -> str:
    """Expression text accepted by the torus-set grammar."""
    if a.is_empty:
        return "EMPTY"
    if a.dimension == 1:
        if a.atoms == ((Fraction(0), Fraction(1)),):
            return "FULL"
        parts = [f"BOX({_fmt(lo)},{_fmt(hi)})" for lo, hi in a.atoms]
    else:
        if a.atoms == (pg.UNIT_SQUARE,):
            return "FULL"
        parts = []
        for poly in a.atoms:
            xs = sorted({p[0] for p in poly})
            ys = sorted({p[1] for p in poly})
            if len(poly) == 4 and len(xs) == 2 and len(ys) == 2:
                parts.append(f"BOX({_fmt(xs[0])},{_fmt(xs[1])};{_fmt(ys[0])},{_fmt(ys[1])})")
            else:
                verts = "; ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in poly)
                parts.append(f"POLY({verts})")
    if len(parts) == 1:
        return parts[0]
    return "UNION(" + ", ".join(parts) + ")"
