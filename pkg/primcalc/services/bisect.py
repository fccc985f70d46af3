from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from ..models.bisection import (
    Atom,
    BasePoint,
    Bisection,
    EssIsotropy,
    EssPoint,
    HarmoniousFamily,
    Space,
    TwoGraphPoint,
)
from ..models.graph import DirGraph, MaximalTail, PathPoint
from ..models.kgraph import ClassTable, KPath, TwoGraph
from ..models.lattice import IntLattice, Vector
from ..models.report import Check, CheckStatus, Report
from ..models.settings import get_settings
from ..models.torus import TorusSet
from ..utils.error_handling import (
    CheckFailure,
    InputError,
    UnanalyzableError,
    UnsupportedError,
    get_logger,
)
from . import graphalg, kgraph2, torusgeo, zklattice


logger = get_logger()

Pair = Tuple[KPath, KPath]


def _add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def _neg(a: Vector) -> Vector:
    return tuple(-x for x in a)


def _join(a: Vector, b: Vector) -> Vector:
    return tuple(max(x, y) for x, y in zip(a, b))


def _meet(a: Vector, b: Vector) -> Vector:
    return tuple(min(x, y) for x, y in zip(a, b))


def _positive(h: Vector) -> Vector:
    return tuple(max(x, 0) for x in h)


def _negative(h: Vector) -> Vector:
    return tuple(max(-x, 0) for x in h)


def _canon(x: PathPoint) -> PathPoint:
    """Shortest prefix and primitive cycle describing the same infinite path."""
    cycle = x.cycle
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            cycle = cycle[:d]
            break
    prefix = x.prefix
    while prefix and prefix[-1] == cycle[-1]:
        cycle = cycle[-1:] + cycle[:-1]
        prefix = prefix[:-1]
    return PathPoint(prefix, cycle)


def canonical(x: PathPoint) -> PathPoint:
    return _canon(x)


# path contexts

class _GraphContext:
    """Directed graph paths as KPath values with an empty red word."""
    k = 1

    def __init__(self, graph: DirGraph):
        problems = graph.validate()
        if problems:
            raise InputError(f"invalid graph {graph.name}: {problems[0]}")
        self.space = graph
        self._edges = {e.name: e for e in graph.edges}

    def degree(self, p: KPath) -> Vector:
        return (len(p.blue),)

    def vertex(self, v: str) -> KPath:
        return KPath((), (), v, v)

    def check_path(self, p: KPath) -> None:
        if p.red or p.range not in self.space.vertices:
            raise InputError(f"{p} is not a path of {self.space.name}")
        v = p.range
        for name in p.blue:
            e = self._edges.get(name)
            if e is None or e.range != v:
                raise InputError(f"path {p} breaks at {name}")
            v = e.source
        if v != p.source:
            raise InputError(f"path {p} ends at {v}, not {p.source}")

    def paths(self, v: str, d: Vector) -> List[KPath]:
        walks = [((), v)]
        for _ in range(d[0]):
            walks = [
                (word + (e.name,), e.source)
                for word, u in walks
                for e in sorted(self.space.edges_into(u), key=lambda e: e.name)
            ]
        return [KPath(word, (), v, u) for word, u in walks]

    def concat(self, a: KPath, b: KPath) -> KPath:
        if a.source != b.range:
            raise InputError(f"{a} and {b} do not compose")
        return KPath(a.blue + b.blue, (), a.range, b.source)

    def _vertex_at(self, p: KPath, i: int) -> str:
        return self._edges[p.blue[i]].range if i < len(p.blue) else p.source

    def segment(self, p: KPath, lo: Vector, hi: Vector) -> KPath:
        return KPath(p.blue[lo[0]:hi[0]], (), self._vertex_at(p, lo[0]), self._vertex_at(p, hi[0]))

    def mce(self, p: KPath, q: KPath) -> List[Pair]:
        """Pairs (alpha, beta) with p alpha = q beta of degree d(p) v d(q)."""
        if p.range != q.range:
            return []
        if len(p.blue) <= len(q.blue):
            if q.blue[:len(p.blue)] != p.blue:
                return []
            return [(self.segment(q, self.degree(p), self.degree(q)), self.vertex(q.source))]
        if p.blue[:len(q.blue)] != q.blue:
            return []
        return [(self.vertex(p.source), self.segment(p, self.degree(q), self.degree(p)))]

    # points

    def check_point(self, x: PathPoint) -> None:
        graphalg.validate_path(self.space, x)

    def point_segment(self, x: PathPoint, d: Vector) -> KPath:
        word = x.word(d[0] + 1)
        return KPath(word[:-1], (), self._edges[word[0]].range, self._edges[word[-1]].range)

    def shift_point(self, x: PathPoint, n: Vector) -> PathPoint:
        return _canon(x.shift(n[0]))

    def same_point(self, x: PathPoint, y: PathPoint) -> bool:
        return _canon(x) == _canon(y)

    def same_shift(self, x: PathPoint, a: Vector, b: Vector) -> bool:
        return self.shift_point(x, a) == self.shift_point(x, b)

    def move(self, x: PathPoint, lam: KPath, rho: KPath) -> PathPoint:
        rest = x.shift(len(rho.blue))
        return _canon(PathPoint(lam.blue + rest.prefix, rest.cycle))


class _TwoGraphContext:
    """2-graph paths in blue-before-red normal form."""
    k = 2

    def __init__(self, graph: TwoGraph):
        report = kgraph2.validate(graph)
        if not report.passed:
            raise InputError(f"invalid 2-graph {graph.name}: {report.failures()[0].name}")
        self.space = graph

    def degree(self, p: KPath) -> Vector:
        return p.degree

    def vertex(self, v: str) -> KPath:
        return KPath((), (), v, v)

    def check_path(self, p: KPath) -> None:
        if p.range not in self.space.vertices:
            raise InputError(f"{p} is not a path of {self.space.name}")
        v = p.range
        for name in p.word():
            try:
                e = self.space.edge(name)
            except KeyError:
                raise InputError(f"unknown edge {name}") from None
            if e.range != v:
                raise InputError(f"path {p} breaks at {name}")
            v = e.source
        if v != p.source:
            raise InputError(f"path {p} ends at {v}, not {p.source}")

    def paths(self, v: str, d: Vector) -> List[KPath]:
        return kgraph2.paths(self.space, v, d)

    def concat(self, a: KPath, b: KPath) -> KPath:
        return kgraph2.compose_paths(self.space, a, b)

    def segment(self, p: KPath, lo: Vector, hi: Vector) -> KPath:
        return kgraph2.segment(self.space, p, lo, hi)

    def mce(self, p: KPath, q: KPath) -> List[Pair]:
        if p.range != q.range:
            return []
        top = _join(p.degree, q.degree)
        out = []
        for gamma in self.paths(p.source, _sub(top, p.degree)):
            mu = self.concat(p, gamma)
            if self.segment(mu, (0, 0), q.degree) == q:
                out.append((gamma, self.segment(mu, q.degree, top)))
        return out

    # points

    def check_point(self, x: TwoGraphPoint) -> None:
        self.check_path(x.prefix)
        if x.edges is not None:
            unknown = sorted(set(x.edges) - {e.name for e in self.space.edges})
            if unknown:
                raise InputError(f"unknown edges {unknown}")
            for sq in self.space.squares:
                if sq.blue in x.edges and sq.red in x.edges and not {sq.red2, sq.blue2} <= x.edges:
                    raise InputError(f"edge set is not closed under the square {sq}")
        kgraph2.unique_path(self.space, x.prefix.source, (1, 1), x.edges)

    def point_segment(self, x: TwoGraphPoint, d: Vector) -> KPath:
        top = _join(d, x.prefix.degree)
        rest = kgraph2.unique_path(self.space, x.prefix.source, _sub(top, x.prefix.degree), x.edges)
        return self.segment(self.concat(x.prefix, rest), (0, 0), d)

    def shift_point(self, x: TwoGraphPoint, n: Vector) -> TwoGraphPoint:
        top = _join(n, x.prefix.degree)
        return TwoGraphPoint(self.segment(self.point_segment(x, top), n, top), x.edges)

    def same_point(self, x: TwoGraphPoint, y: TwoGraphPoint) -> bool:
        if x.edges != y.edges:
            return False
        top = _join(x.prefix.degree, y.prefix.degree)
        return self.point_segment(x, top) == self.point_segment(y, top)

    def same_shift(self, x: TwoGraphPoint, a: Vector, b: Vector) -> bool:
        # past the prefix the path is determined by its vertex
        top = _join(_join(a, b), x.prefix.degree)
        ext = _sub(top, _meet(a, b))
        full = self.point_segment(x, _join(_add(a, ext), _add(b, ext)))
        return self.segment(full, a, _add(a, ext)) == self.segment(full, b, _add(b, ext))

    def move(self, x: TwoGraphPoint, lam: KPath, rho: KPath) -> TwoGraphPoint:
        top = _join(rho.degree, x.prefix.degree)
        rest = self.segment(self.point_segment(x, top), rho.degree, top)
        return TwoGraphPoint(self.concat(lam, rest), x.edges)


Context = Union[_GraphContext, _TwoGraphContext]


def _context(space: Space) -> Context:
    if isinstance(space, DirGraph):
        return _GraphContext(space)
    if isinstance(space, TwoGraph):
        return _TwoGraphContext(space)
    raise InputError(f"no bisection calculus for {type(space).__name__}")


# bisection algebra

def _cocycle(ctx: Context, atom: Atom) -> Vector:
    return _sub(ctx.degree(atom.lam), ctx.degree(atom.rho))


def _bisection(ctx: Context, pairs: Iterable[Pair], cocycle: Optional[Vector] = None) -> Bisection:
    atoms = set()
    for lam, rho in pairs:
        ctx.check_path(lam)
        ctx.check_path(rho)
        if lam.source != rho.source:
            raise InputError(f"Z({lam}, {rho}) needs s({lam}) = s({rho})")
        atom = Atom(lam, rho)
        c = _cocycle(ctx, atom)
        if cocycle is None:
            cocycle = c
        elif c != tuple(cocycle):
            raise InputError(f"{atom} has cocycle {c}, expected {tuple(cocycle)}")
        atoms.add(atom)
    if cocycle is None:
        raise InputError("an empty bisection needs an explicit cocycle value")
    return Bisection(frozenset(atoms), tuple(cocycle))


def bisection(space: Space, pairs: Iterable[Pair], cocycle: Optional[Vector] = None) -> Bisection:
    """Build a homogeneous bisection from (lam, rho) pairs."""
    return _bisection(_context(space), pairs, cocycle)


def _unit_space(ctx: Context) -> Bisection:
    return Bisection(frozenset(Atom(ctx.vertex(v), ctx.vertex(v)) for v in ctx.space.vertices),
                     (0,) * ctx.k)


def unit_space(space: Space) -> Bisection:
    return _unit_space(_context(space))


def _cylinder(ctx: Context, paths: Iterable[KPath]) -> Bisection:
    return _bisection(ctx, ((p, p) for p in paths), (0,) * ctx.k)


def cylinder(space: Space, paths: Iterable[KPath]) -> Bisection:
    """The unit bisection over the union of the cylinders Z(p)."""
    return _cylinder(_context(space), paths)


def inverse(b: Bisection) -> Bisection:
    return Bisection(frozenset(Atom(a.rho, a.lam) for a in b.atoms), _neg(b.cocycle))


def _compose(ctx: Context, b1: Bisection, b2: Bisection) -> Bisection:
    atoms = set()
    for first in b1.atoms:
        for second in b2.atoms:
            for alpha, beta in ctx.mce(first.rho, second.lam):
                atoms.add(Atom(ctx.concat(first.lam, alpha), ctx.concat(second.rho, beta)))
    return Bisection(frozenset(atoms), _add(b1.cocycle, b2.cocycle))


def compose(space: Space, b1: Bisection, b2: Bisection) -> Bisection:
    """The set product B1 B2, one atom per minimal common extension."""
    return _compose(_context(space), b1, b2)


def _power(ctx: Context, b: Bisection, n: int) -> Bisection:
    if n == 0:
        return _unit_space(ctx)
    step = b if n > 0 else inverse(b)
    out = step
    for _ in range(abs(n) - 1):
        out = _compose(ctx, out, step)
    return out


def power(space: Space, b: Bisection, n: int) -> Bisection:
    return _power(_context(space), b, n)


def source_cylinders(b: Bisection) -> List[KPath]:
    return sorted({a.rho for a in b.atoms}, key=lambda p: (p.range, p.word()))


def range_cylinders(b: Bisection) -> List[KPath]:
    return sorted({a.lam for a in b.atoms}, key=lambda p: (p.range, p.word()))


def _expand(ctx: Context, b: Bisection, top: Vector) -> frozenset:
    out = set()
    for a in b.atoms:
        ext = _sub(top, ctx.degree(a.lam))
        for gamma in ctx.paths(a.lam.source, ext):
            out.add((ctx.concat(a.lam, gamma), ctx.concat(a.rho, gamma)))
    return frozenset(out)


def _top_degree(ctx: Context, *bs: Bisection) -> Vector:
    top = (0,) * ctx.k
    for b in bs:
        for a in b.atoms:
            top = _join(top, ctx.degree(a.lam))
    return top


def expand(space: Space, b: Bisection, top: Optional[Vector] = None) -> frozenset:
    """Normal form of B: (lam, rho) pairs with every d(lam) equal to ``top``."""
    ctx = _context(space)
    return _expand(ctx, b, tuple(top) if top is not None else _top_degree(ctx, b))


def _subset(ctx: Context, a: Bisection, b: Bisection) -> bool:
    if a.is_empty:
        return True
    if a.cocycle != b.cocycle:
        return False
    top = _top_degree(ctx, a, b)
    return _expand(ctx, a, top) <= _expand(ctx, b, top)


def _equal(ctx: Context, a: Bisection, b: Bisection) -> bool:
    return _subset(ctx, a, b) and _subset(ctx, b, a)


def subset(space: Space, a: Bisection, b: Bisection) -> bool:
    return _subset(_context(space), a, b)


def equal(space: Space, a: Bisection, b: Bisection) -> bool:
    return _equal(_context(space), a, b)


def _is_bisection(ctx: Context, b: Bisection) -> bool:
    pairs = _expand(ctx, b, _top_degree(ctx, b))
    return len({lam for lam, _ in pairs}) == len(pairs) == len({rho for _, rho in pairs})


def is_bisection(space: Space, b: Bisection) -> bool:
    """Range and source maps are injective on B."""
    return _is_bisection(_context(space), b)


def _contains(ctx: Context, b: Bisection, x: BasePoint) -> bool:
    """(x, c, x) lies in B."""
    for a in b.atoms:
        dl, dr = ctx.degree(a.lam), ctx.degree(a.rho)
        if (ctx.point_segment(x, dl) == a.lam and ctx.point_segment(x, dr) == a.rho
                and ctx.same_shift(x, dl, dr)):
            return True
    return False


def _contains_arrow(ctx: Context, b: Bisection, y: BasePoint, x: BasePoint) -> bool:
    """(y, c, x) lies in B."""
    for a in b.atoms:
        dl, dr = ctx.degree(a.lam), ctx.degree(a.rho)
        if (ctx.point_segment(y, dl) == a.lam and ctx.point_segment(x, dr) == a.rho
                and ctx.same_point(ctx.shift_point(y, dl), ctx.shift_point(x, dr))):
            return True
    return False


def contains(space: Space, b: Bisection, x: BasePoint) -> bool:
    return _contains(_context(space), b, x)


def contains_arrow(space: Space, b: Bisection, y: BasePoint, x: BasePoint) -> bool:
    return _contains_arrow(_context(space), b, y, x)


def atoms_through(space: Space, atoms: Iterable[Atom], y: BasePoint, x: BasePoint) -> List[Atom]:
    """The atoms containing an arrow from x to y."""
    ctx = _context(space)
    return [a for a in atoms
            if _contains_arrow(ctx, Bisection(frozenset([a]), _cocycle(ctx, a)), y, x)]


# essential isotropy

def _ess_graph(ctx: _GraphContext, b: Bisection) -> EssIsotropy:
    out = EssIsotropy()
    points = set()
    for a in b.sorted_atoms():
        if a.lam == a.rho:
            out.units.append(a.lam)
            continue
        short, long_ = sorted((a.lam, a.rho), key=lambda p: len(p.blue))
        n = len(short.blue)
        if n == len(long_.blue) or long_.blue[:n] != short.blue or long_.range != short.range:
            continue
        # lam z = rho z forces z to repeat the leftover cycle
        x = _canon(PathPoint(short.blue, long_.blue[n:]))
        c = _cocycle(ctx, a)
        if zklattice.member(c, graphalg.essential_isotropy_group(ctx.space, x)):
            points.add(EssPoint(x, c))
    out.points = sorted(points, key=lambda p: (p.cocycle, str(p.point)))
    return out


def _ess_twograph(ctx: _TwoGraphContext, b: Bisection) -> EssIsotropy:
    graph = ctx.space
    out = EssIsotropy()
    points = set()
    deterministic = set(kgraph2.deterministic_vertices(graph))
    for a in b.sorted_atoms():
        if a.lam == a.rho:
            out.units.append(a.lam)
            continue
        s = a.lam.source
        if not kgraph2.reachable(graph, s) <= deterministic:
            raise UnsupportedError(f"{a} lies over vertices with several continuations")
        top = _join(a.lam.degree, a.rho.degree)
        left = ctx.concat(a.lam, kgraph2.unique_path(graph, s, _sub(top, a.lam.degree)))
        right = ctx.concat(a.rho, kgraph2.unique_path(graph, s, _sub(top, a.rho.degree)))
        if left != right:
            continue
        c = _cocycle(ctx, a)
        if zklattice.member(c, kgraph2.periodicity_group(graph, s)):
            points.add(EssPoint(TwoGraphPoint(left), c))
    out.points = sorted(points, key=lambda p: (p.cocycle, str(p.point)))
    return out


def _ess(ctx: Context, b: Bisection) -> EssIsotropy:
    if isinstance(ctx, _GraphContext):
        return _ess_graph(ctx, b)
    return _ess_twograph(ctx, b)


def ess_isotropy_intersection(space: Space, b: Bisection) -> EssIsotropy:
    """B n I^ess as unit cylinders plus eventually periodic isotropy points."""
    ctx = _context(space)
    result = _ess(ctx, b)
    logger.debug("essential isotropy of %s: %d cylinders, %d points",
                 b, len(result.units), len(result.points))
    return result


def point_isotropy(space: Space, x: BasePoint) -> IntLattice:
    """H(x): Per(T_x) Z for graph points, the class group for 2-graph points."""
    ctx = _context(space)
    ctx.check_point(x)
    if isinstance(ctx, _GraphContext):
        return graphalg.essential_isotropy_group(space, x)
    table = kgraph2.class_table(space)
    return table.classes[_point_class(ctx, x, table)].group


# harmonious families

def graph_family(graph: DirGraph, tail: Union[MaximalTail, Iterable[str]]) -> HarmoniousFamily:
    """B_n = Z(mu^n, r(mu)) for the entrance-free cycle mu of the tail."""
    ctx = _GraphContext(graph)
    t = tail if isinstance(tail, MaximalTail) else graphalg.make_tail(graph, tail)
    if not graphalg.is_tail(graph, t.vertices):
        raise InputError(f"{t.label()} is not a maximal tail")
    if not t.per:
        base = _canon(graphalg.realize_tail(graph, t.vertices))
        logger.info("tail %s is aperiodic; using the unit-space family", t.label())
        return HarmoniousFamily(graph, base, zklattice.zero_lattice(1))
    start = graph.edge(t.cycle[0]).range
    mu = KPath(t.cycle, (), start, start)
    generator = _bisection(ctx, [(mu, ctx.vertex(start))])
    return HarmoniousFamily(graph, PathPoint((), t.cycle), t.group, [((t.per,), generator)])


def _as_point(base: Union[str, KPath, TwoGraphPoint], edges: Optional[Iterable[str]]) -> TwoGraphPoint:
    if isinstance(base, TwoGraphPoint):
        return base
    allowed = frozenset(edges) if edges is not None else None
    if isinstance(base, KPath):
        return TwoGraphPoint(base, allowed)
    return TwoGraphPoint(KPath((), (), base, base), allowed)


def _point_class(ctx: _TwoGraphContext, x: TwoGraphPoint, table: ClassTable) -> int:
    n = len(ctx.space.vertices)
    u = ctx.point_segment(x, _add(x.prefix.degree, (n, n))).source
    for i, c in enumerate(table.classes):
        if u in c.core:
            return i
    raise UnanalyzableError(u, f"'{u}' lies in no class core")


def twograph_family(graph: TwoGraph, base: Union[str, KPath, TwoGraphPoint],
                    edges: Optional[Iterable[str]] = None,
                    group: Optional[IntLattice] = None) -> HarmoniousFamily:
    """Generators Z(x(0,h+), x(0,h-)) at the base point, shifted until each h is a period."""
    ctx = _TwoGraphContext(graph)
    x = _as_point(base, edges)
    ctx.check_point(x)
    certified = "exact"
    if group is None:
        table = kgraph2.class_table(graph)
        cls = table.classes[_point_class(ctx, x, table)]
        group, certified = cls.group, cls.certified
    if group.is_zero:
        return HarmoniousFamily(graph, x, group, certified=certified)
    gens = zklattice.positive_minimal_generators(group) if group.is_full else [group.basis[0]]

    margin = get_settings().get_periodicity_settings()['window_margin']
    limit = len(graph.vertices) + max(x.prefix.degree) + margin
    for t in range(limit + 1):
        n = (t, t)
        if all(ctx.same_shift(x, _add(n, _positive(h)), _add(n, _negative(h))) for h in gens):
            break
    else:
        raise UnanalyzableError(x.prefix.source, f"no shift of {x} makes {gens} periods")
    if t:
        x = ctx.shift_point(x, n)
        logger.info("shifted the base point by %s", n)

    generators = []
    for h in gens:
        lam = ctx.point_segment(x, _positive(h))
        rho = ctx.point_segment(x, _negative(h))
        generators.append((tuple(h), _bisection(ctx, [(lam, rho)])))
    return HarmoniousFamily(graph, x, group, generators, shift=n, certified=certified)


def _coordinates(family: HarmoniousFamily, h: Vector) -> List[int]:
    gens = [g for g, _ in family.generators]
    if not zklattice.member(h, family.group):
        raise InputError(f"{h} is not in {family.group}")
    if len(gens) == 1:
        g = gens[0]
        i = next(i for i, a in enumerate(g) if a)
        coeffs = [Fraction(h[i], g[i])]
    elif len(gens) == 2:
        (a, b), (c, d) = gens
        det = a * d - b * c
        coeffs = [Fraction(h[0] * d - c * h[1], det), Fraction(a * h[1] - b * h[0], det)]
    else:
        raise UnsupportedError(f"families with {len(gens)} generators")
    if any(m.denominator != 1 for m in coeffs):
        raise InputError(f"{h} is not an integer combination of {gens}")
    return [int(m) for m in coeffs]


def _product(ctx: Context, factors: Sequence[Bisection]) -> Bisection:
    if not factors:
        return _unit_space(ctx)
    out = factors[0]
    for f in factors[1:]:
        out = _compose(ctx, out, f)
    return out


def _member(ctx: Context, family: HarmoniousFamily, h: Vector) -> Bisection:
    h = tuple(h)
    if h in family.overrides:
        b = family.overrides[h]
    elif not any(h):
        b = family.unit or _unit_space(ctx)
    else:
        coeffs = _coordinates(family, h)
        pairs = list(zip(coeffs, (g for _, g in family.generators)))
        negatives = [_power(ctx, g, m) for m, g in pairs if m < 0]
        positives = [_power(ctx, g, m) for m, g in pairs if m > 0]
        b = _product(ctx, negatives + positives)
    if family.conjugator is not None:
        c = family.conjugator
        b = _compose(ctx, _compose(ctx, c, b), inverse(c))
    return b


def family_member(family: HarmoniousFamily, h: Sequence[int]) -> Bisection:
    """B_h: negative generator powers first, then positive ones."""
    return _member(_context(family.space), family, tuple(h))


def _index(family: HarmoniousFamily, truncation: int) -> List[Vector]:
    zero = (0,) * family.k
    out = [zero]
    for coeffs in itertools.product(range(-truncation, truncation + 1), repeat=family.rank):
        h = zero
        for m, (g, _) in zip(coeffs, family.generators):
            h = _add(h, tuple(m * x for x in g))
        if h not in out:
            out.append(h)
    return out


def _unsupported(report: Report, name: str, run: Callable[[], Tuple[bool, object]]) -> None:
    try:
        ok, witness = run()
    except UnsupportedError as exc:
        report.checks.append(Check(name, CheckStatus.UNSUPPORTED, message=str(exc)))
        return
    report.add(name, ok, witness=witness)


def _ess_inverse_check(ctx: Context, bh: Bisection, bneg: Bisection):
    e1, e2 = _ess(ctx, bh), _ess(ctx, bneg)
    flipped = {EssPoint(p.point, _neg(p.cocycle)) for p in e1.points}
    same_units = _equal(ctx, _cylinder(ctx, e1.units), _cylinder(ctx, e2.units))
    diff = sorted(str(p.point) for p in flipped.symmetric_difference(e2.points))
    return same_units and not diff, diff or None


def _ess_product_check(ctx: Context, ba: Bisection, bb: Bisection, bs: Bisection):
    ess = _ess(ctx, bb)
    if not _subset(ctx, _compose(ctx, ba, _cylinder(ctx, ess.units)), bs):
        return False, [str(u) for u in ess.units]
    for p in ess.points:
        x = p.point
        for a in ba.atoms:
            if ctx.point_segment(x, ctx.degree(a.rho)) != a.rho:
                continue
            y = ctx.move(x, a.lam, a.rho)
            if not _contains_arrow(ctx, bs, y, x):
                return False, [str(y), str(x)]
    return True, None


def verify_harmonious(family: HarmoniousFamily, truncation: Optional[int] = None) -> Report:
    """Check the five family conditions on members with coefficients up to ``truncation``."""
    ctx = _context(family.space)
    t = truncation if truncation is not None else get_settings().get_numeric_settings()['truncation']
    report = Report(f"harmonious family at {family.base}")
    report.notes.update({'truncation': t, 'shift': list(family.shift), 'certified': family.certified})
    index = _index(family, t)
    members = {h: _member(ctx, family, h) for h in index}

    units = _unit_space(ctx)
    zero = index[0]
    outside = [a for a in members[zero].sorted_atoms()
               if not _subset(ctx, Bisection(frozenset([a]), zero), units)]
    report.add("(i) B_x inside the unit space", not outside,
               witness=str(outside[0]) if outside else None)

    for h in index:
        b = members[h]
        wrong = [a for a in b.sorted_atoms() if _cocycle(ctx, a) != h]
        ok = not wrong and b.cocycle == h and _is_bisection(ctx, b)
        report.add(f"(ii) B_{h} homogeneous bisection", ok, witness=str(wrong[0]) if wrong else None)
        report.add(f"(ii) alpha_{h} in B_{h}", _contains(ctx, b, family.base), witness=str(family.base))

    for h in index:
        neg = _neg(h)
        if neg not in members:
            continue
        name = f"(iii) inverse of B_{h}"
        if _equal(ctx, members[neg], inverse(members[h])):
            report.add(name, True, message="B_-h = B_h^-1")
        else:
            _unsupported(report, name, lambda: _ess_inverse_check(ctx, members[h], members[neg]))

    for h in index:
        for g in index:
            s = _add(h, g)
            if s not in members:
                continue
            name = f"(iv) B_{h} B_{g} in B_{s}"
            if _subset(ctx, _compose(ctx, members[h], members[g]), members[s]):
                report.add(name, True)
            else:
                _unsupported(report, name, lambda: _ess_product_check(ctx, members[h], members[g], members[s]))

    report.add("(v) compact open members", True, message="finite unions of cylinder atoms")
    logger.info("verified family at %s over %d members: %s", family.base, len(index),
                "pass" if report.passed else "fail")
    return report


def verify_relative_commutation(space: Space, generators: Sequence[Bisection]) -> Report:
    """B_i B_j = B_j B_i and B_i B_j^-1 inside B_j^-1 B_i for every pair."""
    ctx = _context(space)
    report = Report("relative commutation")
    for i, j in itertools.permutations(range(len(generators)), 2):
        bi, bj = generators[i], generators[j]
        if i < j:
            report.add(f"B{i} B{j} = B{j} B{i}",
                       _equal(ctx, _compose(ctx, bi, bj), _compose(ctx, bj, bi)))
        report.add(f"B{i} B{j}^-1 in B{j}^-1 B{i}",
                   _subset(ctx, _compose(ctx, bi, inverse(bj)), _compose(ctx, inverse(bj), bi)))
    return report


def conjugate_family(conjugator: Bisection, family: HarmoniousFamily,
                     truncation: Optional[int] = None) -> HarmoniousFamily:
    """(C B_h C^-1) based at the image of the base point under C."""
    ctx = _context(family.space)
    for a in conjugator.sorted_atoms():
        if ctx.point_segment(family.base, ctx.degree(a.rho)) == a.rho:
            base = ctx.move(family.base, a.lam, a.rho)
            break
    else:
        raise InputError(f"{family.base} is not in the source of {conjugator}")
    c = conjugator if family.conjugator is None else _compose(ctx, conjugator, family.conjugator)
    moved = HarmoniousFamily(family.space, base, family.group, list(family.generators),
                             family.unit, family.shift, c, dict(family.overrides), family.certified)
    report = verify_harmonious(moved, truncation)
    if any(check.status is CheckStatus.FAIL for check in report.checks):
        raise CheckFailure(report)
    return moved


# saturation

def _class_key(ctx: Context, y, table: Optional[ClassTable]):
    if isinstance(ctx, _GraphContext):
        return y.vertices if isinstance(y, MaximalTail) else frozenset(y)
    return table.index(y) if isinstance(y, str) else int(y)


def shared_group(family: HarmoniousFamily, y, table: Optional[ClassTable] = None,
                 truncation: Optional[int] = None) -> IntLattice:
    """c(B^ess over the class y): cocycles of essential points whose class is y."""
    ctx = _context(family.space)
    t = truncation if truncation is not None else get_settings().get_numeric_settings()['truncation']
    if isinstance(ctx, _TwoGraphContext) and table is None:
        table = kgraph2.class_table(ctx.space)
    key = _class_key(ctx, y, table)
    found = []
    for h in _index(family, t):
        for p in _ess(ctx, _member(ctx, family, h)).points:
            if isinstance(ctx, _GraphContext):
                here = graphalg.tail_of(ctx.space, p.point)
            else:
                here = _point_class(ctx, p.point, table)
            if here == key:
                found.append(p.cocycle)
    return zklattice.canonicalize(found, family.k)


def saturation_export(family: HarmoniousFamily, cylinders: Iterable[KPath], v: TorusSet,
                      table: Optional[ClassTable] = None,
                      truncation: Optional[int] = None) -> List[Tuple[str, TorusSet]]:
    """Per class meeting the cylinder union U, the fiber of (U x V) saturated by the family."""
    ctx = _context(family.space)
    cylinders = list(cylinders)
    for p in cylinders:
        ctx.check_path(p)
    starts = {p.source for p in cylinders}
    out = []
    if isinstance(ctx, _GraphContext):
        for tail in graphalg.maximal_tails(ctx.space):
            if starts & tail.vertices:
                h = shared_group(family, tail, truncation=truncation)
                out.append((tail.label(), torusgeo.saturate(v, h)))
        return out
    table = table or kgraph2.class_table(ctx.space)
    for i, cls in enumerate(table.classes):
        if starts & cls.trace:
            h = shared_group(family, i, table, truncation)
            out.append((cls.name, torusgeo.saturate(v, h)))
    return out
