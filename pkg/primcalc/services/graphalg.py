from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from ..models.graph import (
    FULL,
    ClosedFiber,
    ClosedPresentation,
    DirGraph,
    Edge,
    MaximalTail,
    PathPoint,
    PointSequence,
    PrimOpenSet,
    PrimPresentation,
    Tail,
)
from ..models.lattice import IntLattice, SymbolicSequence, TorusPoint
from ..models.settings import get_settings
from ..models.torus import TorusSet
from ..utils.error_handling import InputError, UnsupportedError, get_logger
from . import torusgeo, zklattice


logger = get_logger()


def travel_graph(graph: DirGraph) -> nx.MultiDiGraph:
    """Arcs r(e) -> s(e): the direction in which infinite paths run."""
    g = nx.MultiDiGraph()
    g.add_nodes_from(graph.vertices)
    for e in graph.edges:
        g.add_edge(e.range, e.source, key=e.name)
    return g


def reach_sets(graph: DirGraph) -> Dict[str, FrozenSet[str]]:
    """v -> {w : vE*w nonempty}, the empty path included."""
    g = travel_graph(graph)
    return {v: frozenset(nx.descendants(g, v) | {v}) for v in graph.vertices}


def _check_graph(graph: DirGraph) -> None:
    issues = graph.validate()
    if issues:
        raise InputError(f"invalid graph {graph.name}: " + "; ".join(issues))


# tails

def is_tail(graph: DirGraph, vertices: Iterable[str],
            reach: Optional[Dict[str, FrozenSet[str]]] = None) -> bool:
    t = frozenset(vertices)
    if not t:
        return False
    reach = reach or reach_sets(graph)
    for e in graph.edges:
        if e.source in t and e.range not in t:
            return False
    for v in t:
        if not any(e.source in t for e in graph.edges_into(v)):
            return False
    for v, w in itertools.combinations(sorted(t), 2):
        if not (reach[v] & reach[w] & t):
            return False
    return True


def entrances(graph: DirGraph, vertices: Iterable[str], cycle: Sequence[str]) -> List[Edge]:
    """Edges entering the cycle from inside the given vertex set."""
    t = frozenset(vertices)
    on_cycle = {graph.edge(name).range for name in cycle}
    return [
        e for e in graph.edges
        if e.range in on_cycle and e.source in t and e.name not in cycle
    ]


def _entrance_free_cycles(graph: DirGraph, t: Tail) -> List[Tuple[str, ...]]:
    """All cycles inside t without an entrance in t (at most one up to rotation for a tail)."""
    found = []
    for start in sorted(t):
        word = []
        v = start
        seen = set()
        while v not in seen:
            seen.add(v)
            into = [e for e in graph.edges_into(v) if e.source in t]
            if len(into) != 1:
                break
            word.append(into[0].name)
            v = into[0].source
        else:
            if v == start:
                found.append(tuple(word))
    return found


def _period(graph: DirGraph, t: Tail) -> Tuple[int, Tuple[str, ...]]:
    cycles = _entrance_free_cycles(graph, t)
    if not cycles:
        return 0, ()
    best = min(cycles, key=lambda c: (len(c), c))
    return len(best), best


def _tail_group(per: int) -> IntLattice:
    return zklattice.canonicalize([(per,)] if per else [], 1)


def make_tail(graph: DirGraph, vertices: Iterable[str]) -> MaximalTail:
    t = frozenset(vertices)
    per, cycle = _period(graph, t)
    return MaximalTail(t, per, cycle, _tail_group(per))


def maximal_tails(graph: DirGraph) -> List[MaximalTail]:
    """Every vertex subset satisfying the three tail conditions, sorted by size then name."""
    _check_graph(graph)
    limit = get_settings().get_enumeration_settings()['max_tail_vertices']
    if len(graph.vertices) > limit:
        raise InputError(f"graph has {len(graph.vertices)} vertices; tail enumeration limit is {limit}")
    reach = reach_sets(graph)
    # condition (1) forces T to contain every vertex reaching T, so tails are
    # unions of the sets up(v) = {u : u reaches v}
    up = {v: frozenset(u for u in graph.vertices if v in reach[u]) for v in graph.vertices}
    candidates: Set[FrozenSet[str]] = set()
    verts = sorted(graph.vertices)
    for size in range(1, len(verts) + 1):
        for combo in itertools.combinations(verts, size):
            cand = frozenset().union(*(up[v] for v in combo))
            candidates.add(cand)
    tails = [make_tail(graph, t) for t in candidates if is_tail(graph, t, reach)]
    tails.sort(key=lambda tl: (len(tl.vertices), sorted(tl.vertices)))
    logger.info("graph %s: %d maximal tails", graph.name, len(tails))
    return tails


def orbit_closure_order(tails: Sequence[MaximalTail]) -> List[Tuple[int, int]]:
    """Pairs (i, j) with tails[i] strictly inside tails[j]: points of j close onto i."""
    return [
        (i, j)
        for i, a in enumerate(tails)
        for j, b in enumerate(tails)
        if a.vertices < b.vertices
    ]


def prim_presentation(graph: DirGraph) -> PrimPresentation:
    tails = maximal_tails(graph)
    return PrimPresentation(tails, orbit_closure_order(tails))


def _tail_lookup(graph: DirGraph, tails: Optional[Sequence[MaximalTail]]) -> Dict[Tail, MaximalTail]:
    tails = tails if tails is not None else maximal_tails(graph)
    return {t.vertices: t for t in tails}


def _known_tail(lookup: Dict[Tail, MaximalTail], vertices: Iterable[str]) -> MaximalTail:
    key = frozenset(vertices)
    if key not in lookup:
        raise InputError(f"unknown tail {{{','.join(sorted(key))}}}")
    return lookup[key]


# paths

def validate_path(graph: DirGraph, x: PathPoint) -> None:
    if not x.cycle:
        raise InputError("path point needs a nonempty cycle")
    try:
        word = [graph.edge(n) for n in x.prefix + x.cycle + x.cycle[:1]]
    except KeyError as exc:
        raise InputError(f"unknown edge {exc.args[0]}") from None
    for a, b in zip(word, word[1:]):
        if a.source != b.range:
            raise InputError(f"edges {a.name} and {b.name} do not compose")


def tail_of(graph: DirGraph, x: PathPoint) -> Tail:
    """T_x = {v : vE*r(x_n) nonempty for some n}."""
    validate_path(graph, x)
    reach = reach_sets(graph)
    on_path = {graph.edge(n).range for n in x.prefix + x.cycle}
    return frozenset(v for v in graph.vertices if reach[v] & on_path)


def realize_tail(graph: DirGraph, vertices: Iterable[str]) -> PathPoint:
    """An eventually periodic path x with T_x equal to the given tail."""
    t = frozenset(vertices)
    reach = reach_sets(graph)
    if not is_tail(graph, t, reach):
        raise InputError(f"{{{','.join(sorted(t))}}} is not a maximal tail")
    order = sorted(t)
    target = order[0]
    for v in order[1:]:
        common = sorted(reach[v] & reach[target] & t)
        target = common[0]
    # walk from target inside t until a vertex repeats
    word: List[str] = []
    visited: Dict[str, int] = {}
    v = target
    while v not in visited:
        visited[v] = len(word)
        e = sorted((e for e in graph.edges_into(v) if e.source in t), key=lambda e: e.name)[0]
        word.append(e.name)
        v = e.source
    cut = visited[v]
    path = PathPoint(tuple(word[:cut]), tuple(word[cut:]))
    logger.debug("realized tail %s by %s", sorted(t), path)
    return path


def essential_isotropy_group(graph: DirGraph, x: PathPoint) -> IntLattice:
    """H(x) = Per(T_x) Z."""
    return make_tail(graph, tail_of(graph, x)).group


def prim_point_of_path(graph: DirGraph, x: PathPoint, z: TorusPoint) -> Tuple[Tail, TorusPoint]:
    """(T_x, z^Per) in the circle coordinate of the tail."""
    tail = make_tail(graph, tail_of(graph, x))
    return tail.vertices, z.power(tail.per) if tail.per else TorusPoint.zero(1)


# closed sets

def point_fiber(tail: MaximalTail, value) -> ClosedFiber:
    if value == FULL or not tail.is_circle:
        return ClosedFiber(outside=torusgeo.empty(1))
    if isinstance(value, TorusPoint):
        return ClosedFiber(points=frozenset([value.angles[0]]))
    return ClosedFiber(points=frozenset([Fraction(value) % 1]))


def _union_fibers(a: ClosedFiber, b: ClosedFiber) -> ClosedFiber:
    if a.outside is None:
        outside = b.outside
    elif b.outside is None:
        outside = a.outside
    else:
        outside = torusgeo.intersect(a.outside, b.outside)
    return ClosedFiber(a.points | b.points, outside)


def fiber_subset(a: ClosedFiber, b: ClosedFiber) -> bool:
    if a.outside is not None and not torusgeo.is_full(a.outside):
        if b.outside is None or not torusgeo.subset(b.outside, a.outside):
            return False
    for p in a.points:
        if p in b.points:
            continue
        if b.outside is None or torusgeo.member(TorusPoint.of(p), b.outside):
            return False
    return True


def fiber_equal(a: ClosedFiber, b: ClosedFiber) -> bool:
    return fiber_subset(a, b) and fiber_subset(b, a)


def as_presentation(points, lookup: Dict[Tail, MaximalTail]) -> ClosedPresentation:
    """Collect (tail, value) points, value a circle-coordinate TorusPoint or FULL."""
    if isinstance(points, ClosedPresentation):
        for t in points.fibers:
            _known_tail(lookup, t)
        return points
    fibers: Dict[Tail, ClosedFiber] = {}
    for vertices, value in points:
        tail = _known_tail(lookup, vertices)
        fib = point_fiber(tail, value)
        fibers[tail.vertices] = _union_fibers(fibers[tail.vertices], fib) if tail.vertices in fibers else fib
    return ClosedPresentation(fibers)


def closure(graph: DirGraph, points, tails: Optional[Sequence[MaximalTail]] = None) -> ClosedPresentation:
    """Hull-kernel closure on the tail presentation.

    (T_y, w) lies in the closure iff T_y is inside the union U of the
    member tails and, when T_y has a period whose witness cycle has no
    entrance in U, w is among the member values on T_y itself.
    """
    lookup = _tail_lookup(graph, tails)
    pres = as_presentation(points, lookup)
    support = pres.support()
    union: FrozenSet[str] = frozenset().union(*support) if support else frozenset()
    out: Dict[Tail, ClosedFiber] = {}
    for key, tail in lookup.items():
        if not union or not key <= union:
            continue
        if not tail.is_circle or entrances(graph, union, tail.cycle):
            out[key] = ClosedFiber(outside=torusgeo.empty(1))
        elif not pres.fiber(key).is_empty:
            out[key] = pres.fiber(key)
    return ClosedPresentation(out)


def presentation_equal(a: ClosedPresentation, b: ClosedPresentation, lookup) -> bool:
    return all(fiber_equal(a.fiber(t), b.fiber(t)) for t in lookup)


def presentation_subset(a: ClosedPresentation, b: ClosedPresentation, lookup) -> bool:
    return all(fiber_subset(a.fiber(t), b.fiber(t)) for t in lookup)


def presentation_union(a: ClosedPresentation, b: ClosedPresentation) -> ClosedPresentation:
    keys = set(a.fibers) | set(b.fibers)
    return ClosedPresentation({t: _union_fibers(a.fiber(t), b.fiber(t)) for t in keys})


# open sets

def _check_open_set(o: PrimOpenSet, lookup: Dict[Tail, MaximalTail]) -> None:
    if set(o.fibers) != set(lookup):
        raise InputError("open set tails do not match the maximal tails of the graph")
    for key, fib in o.fibers.items():
        if lookup[key].is_circle and isinstance(fib, bool):
            o.fibers[key] = torusgeo.full(1) if fib else torusgeo.empty(1)


def complement(o: PrimOpenSet, lookup: Dict[Tail, MaximalTail]) -> ClosedPresentation:
    fibers = {}
    for key, fib in o.fibers.items():
        if isinstance(fib, bool):
            fibers[key] = ClosedFiber() if fib else ClosedFiber(outside=torusgeo.empty(1))
        else:
            fibers[key] = ClosedFiber(outside=fib)
    return ClosedPresentation(fibers)


def is_open(graph: DirGraph, o: PrimOpenSet, tails: Optional[Sequence[MaximalTail]] = None) -> bool:
    """The complement is closed under the closure rule."""
    lookup = _tail_lookup(graph, tails)
    _check_open_set(o, lookup)
    comp = complement(o, lookup)
    return presentation_equal(closure(graph, comp, list(lookup.values())), comp, lookup)


def _fiber_op(a, b, both_bool, set_op):
    if isinstance(a, bool) and isinstance(b, bool):
        return both_bool(a, b)
    a = a if not isinstance(a, bool) else (torusgeo.full(1) if a else torusgeo.empty(1))
    b = b if not isinstance(b, bool) else (torusgeo.full(1) if b else torusgeo.empty(1))
    return set_op(a, b)


def lattice_meet(o1: PrimOpenSet, o2: PrimOpenSet) -> PrimOpenSet:
    if set(o1.fibers) != set(o2.fibers):
        raise InputError("open sets over different tails")
    return PrimOpenSet({
        t: _fiber_op(o1.fibers[t], o2.fibers[t], lambda x, y: x and y, torusgeo.intersect)
        for t in o1.fibers
    })


def lattice_join(o1: PrimOpenSet, o2: PrimOpenSet) -> PrimOpenSet:
    if set(o1.fibers) != set(o2.fibers):
        raise InputError("open sets over different tails")
    return PrimOpenSet({
        t: _fiber_op(o1.fibers[t], o2.fibers[t], lambda x, y: x or y, torusgeo.union)
        for t in o1.fibers
    })


def uniform_open_set(tails: Sequence[MaximalTail], chosen: Iterable[Tail]) -> PrimOpenSet:
    """FULL on the chosen tails, EMPTY elsewhere."""
    chosen = set(chosen)
    fibers = {}
    for t in tails:
        on = t.vertices in chosen
        fibers[t.vertices] = (torusgeo.full(1) if on else torusgeo.empty(1)) if t.is_circle else on
    return PrimOpenSet(fibers)


def _is_hereditary_saturated(graph: DirGraph, h: FrozenSet[str]) -> bool:
    for e in graph.edges:
        if e.range in h and e.source not in h:
            return False
    for v in graph.vertices:
        if v not in h and all(e.source in h for e in graph.edges_into(v)):
            return False
    return True


def hereditary_saturated_sets(graph: DirGraph) -> List[List[str]]:
    """Saturated hereditary vertex sets, smallest first."""
    _check_graph(graph)
    verts = sorted(graph.vertices)
    out = []
    for size in range(len(verts) + 1):
        for combo in itertools.combinations(verts, size):
            if _is_hereditary_saturated(graph, frozenset(combo)):
                out.append(list(combo))
    return out


def gauge_invariant_ideals(graph: DirGraph) -> List[List[str]]:
    """Gauge-invariant ideals, each given by its saturated hereditary vertex set."""
    return hereditary_saturated_sets(graph)


def ideal_of_open_set(graph: DirGraph, o: PrimOpenSet,
                      tails: Optional[Sequence[MaximalTail]] = None) -> List[str]:
    """Vertex set of an open set whose fibers are all EMPTY or FULL."""
    lookup = _tail_lookup(graph, tails)
    _check_open_set(o, lookup)
    for key, fib in o.fibers.items():
        if not (_is_full_fiber(fib) or _is_empty_fiber(fib)):
            raise InputError(f"fiber over {lookup[key].label()} is neither EMPTY nor FULL")
    if not is_open(graph, o, list(lookup.values())):
        raise InputError("not an open set")
    closed = [t for t, fib in o.fibers.items() if _is_empty_fiber(fib)]
    covered = frozenset().union(*closed) if closed else frozenset()
    return sorted(set(graph.vertices) - covered)


def open_set_of_vertex_set(graph: DirGraph, vertices: Iterable[str],
                           tails: Optional[Sequence[MaximalTail]] = None) -> PrimOpenSet:
    """Open set of the gauge-invariant ideal generated by the vertex projections."""
    h = frozenset(vertices)
    tails = tails if tails is not None else maximal_tails(graph)
    return uniform_open_set(tails, [t.vertices for t in tails if t.vertices & h])


def _is_full_fiber(fib) -> bool:
    return fib if isinstance(fib, bool) else torusgeo.is_full(fib)


def _is_empty_fiber(fib) -> bool:
    return (not fib) if isinstance(fib, bool) else fib.is_empty


def sandwich_sets(graph: DirGraph, o: PrimOpenSet,
                  tails: Optional[Sequence[MaximalTail]] = None) -> Tuple[List[str], List[str]]:
    """Vertex sets of the largest gauge ideal inside and smallest gauge ideal around O.

    U holds the vertices all of whose tails carry a FULL fiber; V those
    all of whose tails carry a nonempty fiber.
    """
    lookup = _tail_lookup(graph, tails)
    if not is_open(graph, o, list(lookup.values())):
        raise InputError("sandwich sets need an open set")
    u, v = [], []
    for vert in sorted(graph.vertices):
        through = [o.fibers[t] for t in lookup if vert in t]
        if all(_is_full_fiber(f) for f in through):
            u.append(vert)
        if all(not _is_empty_fiber(f) for f in through):
            v.append(vert)
    return u, v


# convergence

def convergence_group(graph: DirGraph, term_tail: MaximalTail, target: MaximalTail) -> IntLattice:
    """Shared periodicity of the target's canonical family seen from a term's tail."""
    if term_tail.vertices == target.vertices:
        return target.group
    if not target.is_circle or entrances(graph, term_tail.vertices, target.cycle):
        return zklattice.zero_lattice(1)
    raise UnsupportedError(
        f"tail {term_tail.label()} strictly contains {target.label()} without "
        f"an entrance to its witness cycle"
    )


def converge_prim(graph: DirGraph, seq: PointSequence, target: Tuple[Iterable[str], TorusPoint],
                  tails: Optional[Sequence[MaximalTail]] = None) -> bool:
    """Convergence of an eventually periodic sequence of Prim points.

    Sequence terms and the target carry z in the raw T coordinate of
    prim_point_of_path's input, not the circle coordinate w = z^Per used by
    closure and point_fiber. A term matches the target when the two angles
    agree modulo the annihilator of the convergence group, so on a tail of
    period Per the angles z and z + 1/Per name the same point.
    """
    lookup = _tail_lookup(graph, tails)
    if not seq.tail:
        raise InputError("convergence needs a nonempty periodic tail")
    t_tail = _known_tail(lookup, target[0])
    symbolic = SymbolicSequence()
    for vertices, z in seq.tail:
        tail = _known_tail(lookup, vertices)
        if not t_tail.vertices <= tail.vertices:
            return False
        symbolic.tail.append((z, convergence_group(graph, tail, t_tail)))
    for vertices, _ in seq.prefix:
        _known_tail(lookup, vertices)
    return zklattice.converges_along(symbolic, target[1])
