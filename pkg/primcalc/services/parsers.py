"""
Lark grammars for the text formats: graphs, 2-graphs, torus-set
expressions, D-set files, Prim open sets, Prim points and point sequences.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from ..models.dset import DSet
from ..models.graph import FULL, DirGraph, Edge, MaximalTail, PathPoint, PointSequence, PointValue, PrimOpenSet, Tail
from ..models.kgraph import Color, KEdge, Square, TwoGraph
from ..models.lattice import TorusPoint
from ..models.torus import TorusSet
from ..utils.error_handling import InputError, PrimcalcError, get_logger
from . import torusgeo, zklattice


logger = get_logger()

GRAMMAR = r"""
    graph_file: (_graph_stmt? _NL)* _graph_stmt?
    _graph_stmt: graph_decl | vertex_decl | edge_decl
    graph_decl: "graph" NAME
    vertex_decl: "vertex" NAME+
    edge_decl: "edge" NAME NAME NAME

    kgraph_file: (_kgraph_stmt? _NL)* _kgraph_stmt?
    _kgraph_stmt: kgraph_decl | vertex_decl | blue_decl | red_decl | square_decl
    kgraph_decl: "kgraph" NAME
    blue_decl: "blue" NAME NAME NAME
    red_decl: "red" NAME NAME NAME
    square_decl: "square" NAME NAME "=" NAME NAME

    dset_file: (assign? _NL)* assign?
    assign: NAME "=" _expr

    openset_file: (open_fiber? _NL)* open_fiber?
    open_fiber: tailset "=" _expr

    torus_expr: _expr

    point_list: (point (","? point)*)?
    sequence: point* ELLIPSIS point+ ELLIPSIS
    point: "(" tailset "," _value ")"
    tailset: "{" NAME ("," NAME)* "}"

    path_point: prefix "(" word ")" INF?
    prefix: (NAME ".")*
    word: NAME ("." NAME)*
    _value: RATIONAL | full

    _expr: full | empty | box | poly | union | inter | sat
    full: "FULL"
    empty: "EMPTY"
    box: "BOX" "(" pair (";" pair)* ")"
    poly: "POLY" "(" pair (";" pair)* ")"
    pair: RATIONAL "," RATIONAL
    union: "UNION" "(" _expr ("," _expr)* ")"
    inter: "INTER" "(" _expr ("," _expr)* ")"
    sat: "SAT" "(" _expr ";" "H" "=" matrix ")"
    matrix: "[" (row ("," row)*)? "]"
    row: "[" INT_LIT ("," INT_LIT)* "]"

    ELLIPSIS: "..."
    INF: "^inf"
    NAME: /[A-Za-z0-9_][A-Za-z0-9_'\-]*/
    RATIONAL: /-?\d+(\/\d+)?/
    INT_LIT: /-?\d+/
    COMMENT: /#[^\n]*/
    _NL: /\r?\n/

    %import common.WS_INLINE
    %ignore WS_INLINE
    %ignore COMMENT
"""

_STARTS = ['graph_file', 'kgraph_file', 'dset_file', 'openset_file', 'torus_expr',
           'point_list', 'sequence', 'path_point', 'word']

_parser: Optional[Lark] = None


def _get_parser() -> Lark:
    global _parser
    if _parser is None:
        _parser = Lark(GRAMMAR, start=_STARTS, parser="lalr", propagate_positions=True)
    return _parser


class _Builder(Transformer):
    """Parse tree to plain values; torus expressions become TorusSet values in T^k."""

    def __init__(self, k: int = 2):
        super().__init__()
        self.k = k

    # terminals

    def NAME(self, tok: Token) -> str:
        return str(tok)

    def RATIONAL(self, tok: Token) -> Fraction:
        return Fraction(str(tok))

    def INT_LIT(self, tok: Token) -> int:
        return int(tok)

    # declarations

    def graph_decl(self, items):
        return ('graph', items[0])

    def kgraph_decl(self, items):
        return ('kgraph', items[0])

    def vertex_decl(self, items):
        return ('vertex', list(items))

    def edge_decl(self, items):
        return ('edge', tuple(items))

    def blue_decl(self, items):
        return ('blue', tuple(items))

    def red_decl(self, items):
        return ('red', tuple(items))

    def square_decl(self, items):
        return ('square', tuple(items))

    def graph_file(self, items):
        return list(items)

    kgraph_file = graph_file

    @v_args(meta=True)
    def assign(self, meta, items):
        return (items[0], items[1], meta.line)

    @v_args(meta=True)
    def open_fiber(self, meta, items):
        return (items[0], items[1], meta.line)

    def dset_file(self, items):
        return list(items)

    openset_file = dset_file

    def torus_expr(self, items):
        return items[0]

    # points

    def tailset(self, items) -> Tail:
        return frozenset(items)

    def point(self, items):
        vertices, value = items
        return (vertices, FULL if isinstance(value, TorusSet) else TorusPoint.of(value))

    def point_list(self, items):
        return list(items)

    def sequence(self, items):
        marks = [i for i, item in enumerate(items) if isinstance(item, Token)]
        first, second = marks
        return PointSequence(prefix=list(items[:first]), tail=list(items[first + 1:second]))

    def prefix(self, items):
        return tuple(items)

    def word(self, items):
        return tuple(items)

    def path_point(self, items):
        return PathPoint(items[0], items[1])

    # torus sets

    def full(self, _):
        return torusgeo.full(self.k)

    def empty(self, _):
        return torusgeo.empty(self.k)

    def pair(self, items):
        return tuple(items)

    @v_args(meta=True)
    def box(self, meta, items):
        if len(items) != self.k:
            raise InputError(f"BOX has {len(items)} intervals, expected {self.k}", meta.line, meta.column)
        return torusgeo.box([a for a, _ in items], [b for _, b in items])

    @v_args(meta=True)
    def poly(self, meta, items):
        if self.k != 2:
            raise InputError("POLY needs T^2", meta.line, meta.column)
        return torusgeo.polygon(items)

    def union(self, items):
        return torusgeo.union_all(items, self.k)

    def inter(self, items):
        return torusgeo.intersect_all(items, self.k)

    def row(self, items):
        return tuple(items)

    def matrix(self, items):
        return [r for r in items if r is not None]

    @v_args(meta=True)
    def sat(self, meta, items):
        w, rows = items
        if any(len(r) != self.k for r in rows):
            raise InputError(f"SAT generators must have length {self.k}", meta.line, meta.column)
        return torusgeo.saturate(w, zklattice.canonicalize(rows, self.k))


def _describe(exc: UnexpectedInput) -> str:
    if isinstance(exc, UnexpectedEOF):
        return "unexpected end of input"
    if isinstance(exc, UnexpectedCharacters):
        return f"unexpected character {exc.char!r}"
    if isinstance(exc, UnexpectedToken):
        if exc.token.type == '$END':
            return "unexpected end of input"
        return f"unexpected {str(exc.token)!r}"
    return str(exc)


def _run(text: str, start: str, what: str, k: int = 2):
    try:
        tree = _get_parser().parse(text, start=start)
    except UnexpectedInput as exc:
        line = exc.line if getattr(exc, 'line', -1) and exc.line > 0 else None
        column = exc.column if line is not None else None
        raise InputError(f"cannot parse {what}: {_describe(exc)}", line, column) from None
    try:
        return _Builder(k).transform(tree)
    except VisitError as exc:
        orig = exc.orig_exc
        if isinstance(orig, PrimcalcError):
            raise orig from None
        line = getattr(exc.obj, 'line', None)
        if line is None and hasattr(exc.obj, 'meta'):
            line = getattr(exc.obj.meta, 'line', None)
        raise InputError(f"invalid {what}: {orig}", line) from None


def read_text(path: Union[str, Path]) -> str:
    return Path(path).read_text(encoding="utf-8")


# graphs

def parse_graph(text: str) -> DirGraph:
    """Graph DSL: ``graph``, ``vertex`` and ``edge <name> <range> <source>`` lines."""
    graph = DirGraph("graph")
    for kind, value in _run(text, 'graph_file', "graph"):
        if kind == 'graph':
            graph.name = value
        elif kind == 'vertex':
            graph.vertices.extend(value)
        else:
            graph.edges.append(Edge(*value))
    logger.debug("parsed graph %s: %d vertices, %d edges", graph.name, len(graph.vertices), len(graph.edges))
    return graph


def parse_kgraph(text: str) -> TwoGraph:
    """2-graph DSL with ``blue``, ``red`` and ``square f g = g' f'`` lines."""
    graph = TwoGraph("kgraph")
    for kind, value in _run(text, 'kgraph_file', "2-graph"):
        if kind == 'kgraph':
            graph.name = value
        elif kind == 'vertex':
            graph.vertices.extend(value)
        elif kind == 'square':
            graph.squares.append(Square(*value))
        else:
            color = Color.BLUE if kind == 'blue' else Color.RED
            name, rng, src = value
            graph.edges.append(KEdge(name, color, rng, src))
    logger.debug("parsed 2-graph %s: %d vertices, %d edges, %d squares",
                 graph.name, len(graph.vertices), len(graph.edges), len(graph.squares))
    return graph


def parse_graph_file(path: Union[str, Path]) -> DirGraph:
    return parse_graph(read_text(path))


def parse_kgraph_file(path: Union[str, Path]) -> TwoGraph:
    return parse_kgraph(read_text(path))


# torus sets

def parse_torus(text: str, k: int = 2) -> TorusSet:
    return _run(text.strip(), 'torus_expr', "torus-set expression", k)


def parse_dset(text: str) -> DSet:
    """Lines ``<vertex> = <expression in T^2>``."""
    fibers: Dict[str, TorusSet] = {}
    for vertex, fiber, line in _run(text, 'dset_file', "D-set"):
        if vertex in fibers:
            raise InputError(f"vertex {vertex} assigned twice", line)
        fibers[vertex] = fiber
    return DSet(fibers)


def parse_dset_file(path: Union[str, Path]) -> DSet:
    return parse_dset(read_text(path))


def parse_open_set(text: str, tails: Sequence[MaximalTail]) -> PrimOpenSet:
    """Lines ``{v,w} = <expression in T>``; unlisted tails get the empty fiber."""
    lookup = {t.vertices: t for t in tails}
    fibers: Dict[Tail, Union[bool, TorusSet]] = {
        t.vertices: (torusgeo.empty(1) if t.is_circle else False) for t in tails
    }
    seen = set()
    for key, fiber, line in _run(text, 'openset_file', "open set", k=1):
        tail = lookup.get(key)
        if tail is None:
            raise InputError(f"{{{','.join(sorted(key))}}} is not a maximal tail", line)
        if key in seen:
            raise InputError(f"tail {tail.label()} assigned twice", line)
        seen.add(key)
        if tail.is_circle:
            fibers[key] = fiber
        elif fiber.is_empty or torusgeo.is_full(fiber):
            fibers[key] = not fiber.is_empty
        else:
            raise InputError(f"tail {tail.label()} has a point fiber: use FULL or EMPTY", line)
    return PrimOpenSet(fibers)


# Prim points

def parse_points(text: str) -> List[Tuple[Tail, PointValue]]:
    """Points ``({v,w},1/3)`` or ``({v},FULL)``, optionally comma separated."""
    return _run(text.strip(), 'point_list', "point list", k=1)


def parse_target(text: str) -> Tuple[Tail, TorusPoint]:
    points = parse_points(text)
    if len(points) != 1 or points[0][1] == FULL:
        raise InputError("a target is a single point with a rational value")
    return points[0]


def parse_sequence(text: str) -> PointSequence:
    """``p1 p2 ... q1 q2 ...``: a prefix, then a block repeated forever."""
    seq = _run(text.strip(), 'sequence', "point sequence", k=1)
    if any(value == FULL for _, value in seq.prefix + seq.tail):
        raise InputError("sequence terms need rational values")
    return seq


# paths

def parse_path_point(text: str) -> PathPoint:
    """``f.(g)^inf`` or ``(e)``: prefix edges, then the repeating cycle in parentheses."""
    return _run(text.strip(), 'path_point', "path point")


def parse_word(text: str) -> Tuple[str, ...]:
    """Dot separated edge names, ``e.e.f``."""
    return _run(text.strip(), 'word', "edge word")


# unparsing

def unparse_graph(graph: DirGraph) -> str:
    lines = [f"graph {graph.name}", "vertex " + " ".join(graph.vertices)]
    lines += [f"edge {e.name} {e.range} {e.source}" for e in graph.edges]
    return "\n".join(lines) + "\n"


def unparse_kgraph(graph: TwoGraph) -> str:
    lines = [f"kgraph {graph.name}", "vertex " + " ".join(graph.vertices)]
    lines += [f"{e.color.value} {e.name} {e.range} {e.source}" for e in graph.edges]
    lines += [f"square {s.blue} {s.red} = {s.red2} {s.blue2}" for s in graph.squares]
    return "\n".join(lines) + "\n"


def unparse_dset(d: DSet) -> str:
    return "".join(f"{v} = {torusgeo.render(d.fibers[v])}\n" for v in d.vertices())


def unparse_open_set(o: PrimOpenSet) -> str:
    lines = []
    for key, fiber in sorted(o.fibers.items(), key=lambda kv: sorted(kv[0])):
        if isinstance(fiber, bool):
            text = "FULL" if fiber else "EMPTY"
        else:
            text = torusgeo.render(fiber)
        lines.append(f"{{{','.join(sorted(key))}}} = {text}")
    return "\n".join(lines) + "\n"
