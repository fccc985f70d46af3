from __future__ import annotations

import itertools
import json
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from ..models.graph import DirGraph
from ..models.kgraph import (
    ClassTable,
    Color,
    Degree,
    KEdge,
    KPath,
    LocalPeriodicity,
    PathClass,
    Square,
    TwoGraph,
)
from ..models.lattice import IntLattice
from ..models.report import Report
from ..models.settings import get_settings
from ..utils.error_handling import CheckFailure, InputError, UnanalyzableError, get_logger
from . import zklattice


logger = get_logger()

BLUE, RED = Color.BLUE, Color.RED


# structure

def validate(graph: TwoGraph) -> Report:
    """Skeleton and factorisation checks, one entry per violation."""
    report = Report(f"validate {graph.name}")
    names = [e.name for e in graph.edges]
    dupes = sorted({n for n in names if names.count(n) > 1})
    report.add("unique edge names", not dupes, witness=dupes or None)
    unknown = [e.name for e in graph.edges if e.range not in graph.vertices or e.source not in graph.vertices]
    report.add("edge endpoints", not unknown, witness=unknown or None)
    if dupes or unknown:
        return report

    for v in graph.vertices:
        for color in (BLUE, RED):
            report.add(f"{color.value} edge into {v}", bool(graph.edges_into(v, color)), witness=v)

    by_name = {e.name: e for e in graph.edges}
    seen_br: Dict[Tuple[str, str], int] = {}
    seen_rb: Dict[Tuple[str, str], int] = {}
    for sq in graph.squares:
        edges = [by_name.get(n) for n in (sq.blue, sq.red, sq.red2, sq.blue2)]
        if None in edges:
            report.add(f"square {sq}", False, message="unknown edge")
            continue
        f, g, g2, f2 = edges
        colors_ok = f.color is BLUE and f2.color is BLUE and g.color is RED and g2.color is RED
        composes = (f.source == g.range and g2.source == f2.range
                    and f.range == g2.range and g.source == f2.source)
        report.add(f"square {sq}", colors_ok and composes, witness=str(sq))
        seen_br[(sq.blue, sq.red)] = seen_br.get((sq.blue, sq.red), 0) + 1
        seen_rb[(sq.red2, sq.blue2)] = seen_rb.get((sq.red2, sq.blue2), 0) + 1

    for f in graph.colored(BLUE):
        for g in graph.colored(RED):
            if f.source == g.range:
                count = seen_br.get((f.name, g.name), 0)
                report.add(f"factorisation of {f.name}{g.name}", count == 1,
                           value=count, witness=[f.name, g.name])
            if g.source == f.range:
                count = seen_rb.get((g.name, f.name), 0)
                report.add(f"factorisation of {g.name}{f.name}", count == 1,
                           value=count, witness=[g.name, f.name])
    logger.info("validated %s: %s", graph.name, "pass" if report.passed else "fail")
    return report


def _require_valid(graph: TwoGraph) -> None:
    report = validate(graph)
    if not report.passed:
        bad = report.failures()[0]
        raise InputError(f"invalid 2-graph {graph.name}: {bad.name}")


def travel_graph(graph: TwoGraph, within: Optional[Iterable[str]] = None) -> nx.MultiDiGraph:
    keep = set(graph.vertices if within is None else within)
    g = nx.MultiDiGraph()
    g.add_nodes_from(keep)
    for e in graph.edges:
        if e.range in keep and e.source in keep:
            g.add_edge(e.range, e.source, key=e.name, color=e.color.value)
    return g


def reachable(graph: TwoGraph, v: str, within: Optional[Iterable[str]] = None) -> FrozenSet[str]:
    return frozenset(nx.descendants(travel_graph(graph, within), v) | {v})


# paths

def paths(graph: TwoGraph, v: str, degree: Degree) -> List[KPath]:
    """All of v Lambda^degree in blue-before-red normal form, sorted by word."""
    m, n = degree
    out: List[KPath] = []

    def walk(vertex: str, color: Color, steps: int) -> Iterator[Tuple[Tuple[str, ...], str]]:
        if steps == 0:
            yield (), vertex
            return
        for e in graph.edges_into(vertex, color):
            for rest, end in walk(e.source, color, steps - 1):
                yield (e.name,) + rest, end

    for blue, mid in walk(v, BLUE, m):
        for red, end in walk(mid, RED, n):
            out.append(KPath(blue, red, v, end))
    out.sort(key=lambda p: p.word())
    return out


def _grid(graph: TwoGraph, path: KPath, squares=None):
    """Fill the m x n grid of a path: blue[i][j] joins (i,j)-(i+1,j), red[i][j] joins (i,j)-(i,j+1)."""
    m, n = path.degree
    squares = squares if squares is not None else graph.square_map()
    blue = [[None] * (n + 1) for _ in range(m)]
    red = [[None] * n for _ in range(m + 1)]
    for i in range(m):
        blue[i][0] = path.blue[i]
    for j in range(n):
        red[m][j] = path.red[j]
    for i in range(m - 1, -1, -1):
        for j in range(n):
            key = (blue[i][j], red[i + 1][j])
            if key not in squares:
                raise InputError(f"no factorisation square for {key[0]}{key[1]}")
            red[i][j], blue[i][j + 1] = squares[key]
    return blue, red


def _vertex_at(graph: TwoGraph, path: KPath, blue, red, i: int, j: int) -> str:
    m, n = path.degree
    if i < m:
        return graph.edge(blue[i][j]).range
    if j < n:
        return graph.edge(red[i][j]).range
    return path.source


def segment(graph: TwoGraph, path: KPath, p: Degree, q: Degree) -> KPath:
    """lambda(p, q) for 0 <= p <= q <= d(lambda)."""
    d = path.degree
    if not (0 <= p[0] <= q[0] <= d[0] and 0 <= p[1] <= q[1] <= d[1]):
        raise InputError(f"segment {p}..{q} outside degree {d}")
    blue, red = _grid(graph, path)
    return _segment_from_grid(graph, path, blue, red, p, q)


def _segment_from_grid(graph, path, blue, red, p, q) -> KPath:
    b = tuple(blue[i][p[1]] for i in range(p[0], q[0]))
    r = tuple(red[q[0]][j] for j in range(p[1], q[1]))
    return KPath(b, r, _vertex_at(graph, path, blue, red, *p), _vertex_at(graph, path, blue, red, *q))


def factor(graph: TwoGraph, path: KPath) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """The red-before-blue factorisation (red word, blue word)."""
    m, n = path.degree
    blue, red = _grid(graph, path)
    return tuple(red[0][j] for j in range(n)), tuple(blue[i][n] for i in range(m))


def compose_paths(graph: TwoGraph, first: KPath, second: KPath) -> KPath:
    """first . second, returned in normal form."""
    if first.source != second.range:
        raise InputError(f"{first} and {second} do not compose")
    # move the blue edges of second past the red edges of first
    squares = graph.square_map()
    inverse = {v: k for k, v in squares.items()}
    reds = list(first.red)
    moved_blue = []
    for f in second.blue:
        for idx in range(len(reds) - 1, -1, -1):
            g = reds[idx]
            if (g, f) not in inverse:
                raise InputError(f"no factorisation square for {g}{f}")
            f, reds[idx] = inverse[(g, f)]
        moved_blue.append(f)
    return KPath(first.blue + tuple(moved_blue), tuple(reds) + second.red, first.range, second.source)


# deterministic components

def deterministic_vertices(graph: TwoGraph, within: Optional[Iterable[str]] = None) -> List[str]:
    """Vertices receiving exactly one edge of each colour (from inside ``within``)."""
    keep = set(graph.vertices if within is None else within)
    out = []
    for v in sorted(keep):
        counts = [sum(1 for e in graph.edges_into(v, c) if e.source in keep) for c in (BLUE, RED)]
        if counts == [1, 1]:
            out.append(v)
    return out


def _step(graph: TwoGraph, v: str, color: Color, keep: Set[str]) -> str:
    into = [e for e in graph.edges_into(v, color) if e.source in keep]
    if len(into) != 1:
        raise UnanalyzableError(v, f"vertex '{v}' is not deterministic")
    return into[0].source


def shift_vertex(graph: TwoGraph, v: str, p: Degree, within: Optional[Iterable[str]] = None) -> str:
    """Range of T^p of the unique infinite path at a deterministic vertex."""
    keep = set(graph.vertices if within is None else within)
    u = v
    for _ in range(p[0]):
        u = _step(graph, u, BLUE, keep)
    for _ in range(p[1]):
        u = _step(graph, u, RED, keep)
    return u


def shift_path(graph: TwoGraph, start, p: Degree, within: Optional[Iterable[str]] = None):
    """Shift a finite path (returning its tail segment) or a deterministic vertex."""
    if isinstance(start, KPath):
        return segment(graph, start, p, start.degree)
    return shift_vertex(graph, start, p, within)


def unique_path(graph: TwoGraph, v: str, degree: Degree,
                edges: Optional[Iterable[str]] = None) -> KPath:
    """Initial segment of the only infinite path at v built from ``edges``."""
    allowed = {e.name for e in graph.edges} if edges is None else set(edges)
    words: Dict[Color, List[str]] = {BLUE: [], RED: []}
    u = v
    for color, steps in ((BLUE, degree[0]), (RED, degree[1])):
        for _ in range(steps):
            into = [e for e in graph.edges_into(u, color) if e.name in allowed]
            if len(into) != 1:
                raise UnanalyzableError(u, f"no unique {color.value} edge into '{u}'")
            words[color].append(into[0].name)
            u = into[0].source
    return KPath(tuple(words[BLUE]), tuple(words[RED]), v, u)


def _state_window(graph: TwoGraph, v: str, size: int, keep: Set[str]) -> Dict[Degree, str]:
    states: Dict[Degree, str] = {}
    u = v
    for i in range(size + 1):
        w = u
        for j in range(size + 1):
            states[(i, j)] = w
            if j < size:
                w = _step(graph, w, RED, keep)
        if i < size:
            u = _step(graph, u, BLUE, keep)
    return states


def coincidence_lattice(graph: TwoGraph, v: str, size: int,
                        within: Optional[Iterable[str]] = None) -> IntLattice:
    """Lattice generated by p - q over window pairs with equal states."""
    keep = set(graph.vertices if within is None else within)
    states = _state_window(graph, v, size, keep)
    by_state: Dict[str, List[Degree]] = {}
    for p, s in states.items():
        by_state.setdefault(s, []).append(p)
    diffs = set()
    for group in by_state.values():
        base = group[0]
        for p in group[1:]:
            diffs.add((p[0] - base[0], p[1] - base[1]))
    return zklattice.canonicalize(sorted(diffs), 2)


def periodicity_group(graph: TwoGraph, v: str, within: Optional[Iterable[str]] = None) -> IntLattice:
    """Periods of the unique infinite path at v: {p - q : T^p x = T^q x}."""
    keep = set(graph.vertices if within is None else within)
    reach = reachable(graph, v, keep)
    margin = get_settings().get_periodicity_settings().get('window_margin', 1)
    size = len(reach) + margin
    lattice = coincidence_lattice(graph, v, 2 * size, keep)

    report = Report(f"periodicity {v}")
    states = _state_window(graph, v, 4 * size, keep)
    for g in lattice.basis:
        bad = None
        for p in itertools.product(range(size, 2 * size + 1), repeat=2):
            q = (p[0] + g[0], p[1] + g[1])
            if min(q) < size:
                continue
            if states[p] != states[q]:
                bad = (p, q)
                break
        report.add(f"period {g}", bad is None, witness=bad)
    if not report.passed:
        logger.warning("periodicity window verification failed at %s", v)
        raise CheckFailure(report)
    logger.info("periodicity group at %s: %s", v, lattice)
    return lattice


# local periodicity

def _pair_candidates(bound: int) -> List[Tuple[Degree, Degree]]:
    box = list(itertools.product(range(bound + 1), repeat=2))
    out = []
    for m in box:
        for n in box:
            if m < n and min(m[0], n[0]) == 0 and min(m[1], n[1]) == 0:
                out.append((m, n))
    return out


def local_periodicity_search(graph: TwoGraph, v: str, bound: Optional[int] = None,
                             depth: Optional[int] = None) -> LocalPeriodicity:
    """Bounded test of (m,n)-periodicity at v: segments of every long path agree.

    Pairs with a common part are skipped; (m,n) and (m-k,n-k) describe the
    same periodicity.
    """
    conf = get_settings().get_periodicity_settings()
    bound = conf['bound'] if bound is None else bound
    depth = conf['depth'] if depth is None else depth
    if bound < 1 or depth < 1:
        raise InputError("bound and depth must be at least 1")
    _require_valid(graph)

    by_degree: Dict[Degree, List[Tuple[Degree, Degree]]] = {}
    for m, n in _pair_candidates(bound):
        top = (max(m[0], n[0]) + depth, max(m[1], n[1]) + depth)
        by_degree.setdefault(top, []).append((m, n))

    squares = graph.square_map()
    confirmed = []
    for top, pairs in sorted(by_degree.items()):
        alive = list(pairs)
        for path in paths(graph, v, top):
            if not alive:
                break
            blue, red = _grid(graph, path, squares)
            still = []
            for m, n in alive:
                a = _segment_from_grid(graph, path, blue, red, m, (m[0] + depth, m[1] + depth))
                b = _segment_from_grid(graph, path, blue, red, n, (n[0] + depth, n[1] + depth))
                if a.word() == b.word():
                    still.append((m, n))
            alive = still
        confirmed.extend(alive)
    confirmed.sort()
    diffs = [(m[0] - n[0], m[1] - n[1]) for m, n in confirmed]
    group = zklattice.canonicalize(diffs, 2)
    logger.debug("local periodicity at %s (bound %d, depth %d): %s", v, bound, depth, diffs)
    return LocalPeriodicity(v, bound, depth, confirmed, group)


# class table

def _core(graph: TwoGraph, component: Set[str]) -> FrozenSet[str]:
    core = set(component)
    changed = True
    while changed:
        changed = False
        for v in sorted(core):
            has = [any(e.source in core for e in graph.edges_into(v, c)) for c in (BLUE, RED)]
            if not all(has):
                core.discard(v)
                changed = True
    return frozenset(core)


def _class_group(graph: TwoGraph, core: FrozenSet[str]) -> Tuple[IntLattice, str]:
    start = min(core)
    if deterministic_vertices(graph, core) == sorted(core):
        return periodicity_group(graph, start, core), "exact"
    groups = {}
    for v in sorted(core):
        groups[v] = local_periodicity_search(graph, v)
    first = groups[start]
    for v, res in groups.items():
        if not zklattice.equal(res.group, first.group):
            raise UnanalyzableError(v)
    logger.warning("class on %s certified by bounded search only", sorted(core))
    return first.group, f"verified to depth {first.depth}"


def class_table(graph: TwoGraph) -> ClassTable:
    """One class per strongly connected core that carries infinite paths.

    Hshare(x, y) for y accumulating at x is H_x meet H_y meet L_x, where L_x
    is the local periodicity group of the cylinder at the first core vertex
    of x: the periodicities shared by every path from that vertex, including
    the ones that leave for y. Such entries are listed as uncertified.
    """
    _require_valid(graph)
    travel = travel_graph(graph)
    cores = []
    for comp in nx.strongly_connected_components(travel):
        core = _core(graph, set(comp))
        if core:
            cores.append(core)
    cores.sort(key=lambda c: sorted(c))

    table = ClassTable()
    for core in cores:
        group, certified = _class_group(graph, core)
        start = min(core)
        trace = frozenset(nx.ancestors(travel, start) | core)
        table.classes.append(PathClass("[" + ",".join(sorted(core)) + "]", core, group, trace, certified))

    local = {}
    for i, c in enumerate(table.classes):
        table.acc[i] = [i]
        table.hshare[(i, i)] = c.group
        reach = nx.descendants(travel, min(c.core))
        for j, d in enumerate(table.classes):
            if j == i or not (d.core & reach):
                continue
            table.acc[i].append(j)
            if i not in local:
                local[i] = local_periodicity_search(graph, min(c.core)).group
            shared = zklattice.meet(zklattice.meet(c.group, d.group), local[i])
            table.hshare[(i, j)] = shared
            table.uncertified.append((i, j))
            logger.warning("shared group of %s over %s is not certified: %s", c.name, d.name, shared)
    logger.info("class table of %s: %d classes", graph.name, len(table.classes))
    return table


def dump_class_table(table: ClassTable) -> str:
    return json.dumps(table.to_dict(), indent=2)


def load_class_table(text: str) -> ClassTable:
    """Read a manual class table; groups are generator lists in Z^2."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"class table is not JSON: {exc.msg}", exc.lineno, exc.colno) from None
    table = ClassTable()
    for i, c in enumerate(data.get('classes', [])):
        core = frozenset(c.get('core', c.get('trace', [])))
        table.classes.append(PathClass(
            name=c.get('name', f"class{i}"),
            core=core,
            group=zklattice.canonicalize(c.get('H', []), 2),
            trace=frozenset(c.get('trace', sorted(core))),
            certified=c.get('certified', "manual"),
        ))
    count = len(table.classes)
    for i, acc in enumerate(data.get('acc', [])):
        if any(not 0 <= j < count for j in acc):
            raise InputError(f"accumulation list of class {i} names an unknown class")
        table.acc[i] = sorted(set(acc) | {i})
    for i in range(count):
        table.acc.setdefault(i, [i])
        table.hshare.setdefault((i, i), table.classes[i].group)
    for entry in data.get('hshare', []):
        x, y = entry['x'], entry['y']
        if not (0 <= x < count and 0 <= y < count):
            raise InputError(f"shared group entry ({x},{y}) names an unknown class")
        table.hshare[(x, y)] = zklattice.canonicalize(entry.get('H', []), 2)
    table.uncertified = [tuple(p) for p in data.get('uncertified', [])]
    return table


# constructions

def encode_graph(graph: DirGraph) -> TwoGraph:
    """A directed graph as a 2-graph: its edges blue, one red loop per vertex."""
    edges = [KEdge(e.name, BLUE, e.range, e.source) for e in graph.edges]
    loops = {v: f"r_{v}" for v in graph.vertices}
    edges += [KEdge(loops[v], RED, v, v) for v in graph.vertices]
    squares = [Square(e.name, loops[e.source], loops[e.range], e.name) for e in graph.edges]
    return TwoGraph(graph.name, list(graph.vertices), edges, squares)


def disjoint_union(first: TwoGraph, second: TwoGraph, prefixes: Tuple[str, str] = ("a", "b")) -> TwoGraph:
    def tag(graph: TwoGraph, p: str):
        ren = lambda n: f"{p}.{n}"
        vertices = [ren(v) for v in graph.vertices]
        edges = [KEdge(ren(e.name), e.color, ren(e.range), ren(e.source)) for e in graph.edges]
        squares = [Square(ren(s.blue), ren(s.red), ren(s.red2), ren(s.blue2)) for s in graph.squares]
        return vertices, edges, squares

    v1, e1, s1 = tag(first, prefixes[0])
    v2, e2, s2 = tag(second, prefixes[1])
    return TwoGraph(f"{first.name}+{second.name}", v1 + v2, e1 + e2, s1 + s2)
