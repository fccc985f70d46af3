"""
Directed graphs, maximal tails and finite presentations of primitive ideal spaces.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Tuple, Union

from .lattice import IntLattice, TorusPoint
from .torus import TorusSet

Tail = FrozenSet[str]


@dataclass(frozen=True)
class Edge:
    """An edge with range r(e) and source s(e)."""
    name: str
    range: str
    source: str

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'range': self.range, 'source': self.source}


@dataclass
class DirGraph:
    """A finite directed graph; paths run from range to source."""
    name: str
    vertices: List[str] = field(default_factory=list)
    edges: List[Edge] = field(default_factory=list)

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise KeyError(name)

    def edges_into(self, v: str) -> List[Edge]:
        """Edges with range v."""
        return [e for e in self.edges if e.range == v]

    def edges_out_of(self, v: str) -> List[Edge]:
        """Edges with source v."""
        return [e for e in self.edges if e.source == v]

    def sources(self) -> List[str]:
        """Vertices receiving no edge."""
        ranges = {e.range for e in self.edges}
        return [v for v in self.vertices if v not in ranges]

    def validate(self) -> List[str]:
        """Return a list of structural problems."""
        issues = []
        names = set()
        for e in self.edges:
            if e.name in names:
                issues.append(f"duplicate edge name {e.name}")
            names.add(e.name)
            for end in (e.range, e.source):
                if end not in self.vertices:
                    issues.append(f"edge {e.name} uses unknown vertex {end}")
        if len(set(self.vertices)) != len(self.vertices):
            issues.append("duplicate vertex names")
        for v in self.sources():
            issues.append(f"vertex {v} receives no edge")
        return issues

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'vertices': list(self.vertices),
            'edges': [e.to_dict() for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DirGraph':
        return cls(
            name=data.get('name', 'graph'),
            vertices=list(data.get('vertices', [])),
            edges=[Edge(e['name'], e['range'], e['source']) for e in data.get('edges', [])],
        )


@dataclass(frozen=True)
class PathPoint:
    """An eventually periodic infinite path: prefix word then a repeating cycle."""
    prefix: Tuple[str, ...]
    cycle: Tuple[str, ...]

    def word(self, length: int) -> Tuple[str, ...]:
        out = list(self.prefix[:length])
        while len(out) < length:
            out.append(self.cycle[(len(out) - len(self.prefix)) % len(self.cycle)])
        return tuple(out)

    def shift(self, n: int = 1) -> 'PathPoint':
        """T^n x."""
        if n <= len(self.prefix):
            return PathPoint(self.prefix[n:], self.cycle)
        m = (n - len(self.prefix)) % len(self.cycle)
        return PathPoint((), self.cycle[m:] + self.cycle[:m])

    def to_dict(self) -> Dict[str, Any]:
        return {'prefix': list(self.prefix), 'cycle': list(self.cycle)}

    def __str__(self) -> str:
        head = "".join(f"{e}." for e in self.prefix)
        return f"{head}({'.'.join(self.cycle)})^inf"


@dataclass(frozen=True)
class MaximalTail:
    """A maximal tail with its period and entrance-free witness cycle."""
    vertices: Tail
    per: int
    cycle: Tuple[str, ...] = ()
    group: Optional[IntLattice] = None

    @property
    def is_circle(self) -> bool:
        return self.per != 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'vertices': sorted(self.vertices),
            'per': self.per,
            'cycle': list(self.cycle),
        }

    def label(self) -> str:
        return "{" + ",".join(sorted(self.vertices)) + "}"


class FiberType(Enum):
    POINT = "point"
    CIRCLE = "circle"


@dataclass
class PrimPresentation:
    """Prim as a list of tails, each contributing a point or a circle."""
    tails: List[MaximalTail]
    order: List[Tuple[int, int]] = field(default_factory=list)

    def fiber_type(self, i: int) -> FiberType:
        return FiberType.CIRCLE if self.tails[i].is_circle else FiberType.POINT

    def index(self, vertices) -> int:
        key = frozenset(vertices)
        for i, t in enumerate(self.tails):
            if t.vertices == key:
                return i
        raise KeyError(sorted(key))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'tails': [t.to_dict() for t in self.tails],
            'fibers': [self.fiber_type(i).value for i in range(len(self.tails))],
            'order': [list(p) for p in self.order],
        }


FULL = "FULL"
PointValue = Union[TorusPoint, str]


@dataclass(frozen=True)
class ClosedFiber:
    """A closed subset of a fiber: finite points united with T minus an open set.

    ``outside`` is the regular open set whose complement is the regular
    closed part; ``None`` means that part is empty. Point fibers use
    ``outside`` only (EMPTY when absent).
    """
    points: FrozenSet[Fraction] = frozenset()
    outside: Optional[TorusSet] = None

    @property
    def is_empty(self) -> bool:
        from ..services import torusgeo
        no_region = self.outside is None or torusgeo.is_full(self.outside)
        return no_region and not self.points

    @property
    def is_full(self) -> bool:
        return self.outside is not None and self.outside.is_empty

    def describe(self) -> str:
        if self.is_full:
            return "FULL"
        if self.is_empty:
            return "EMPTY"
        parts = sorted(str(p) for p in self.points)
        if self.outside is not None:
            from ..services import torusgeo
            parts.append("T\\" + torusgeo.render(self.outside))
        return "{" + ", ".join(parts) + "}"


@dataclass
class ClosedPresentation:
    """Per-tail closed fibers of a closed subset of Prim."""
    fibers: Dict[Tail, ClosedFiber] = field(default_factory=dict)

    def fiber(self, tail: Tail) -> ClosedFiber:
        return self.fibers.get(tail, ClosedFiber())

    def support(self) -> List[Tail]:
        return [t for t, f in self.fibers.items() if not f.is_empty]

    def to_dict(self) -> Dict[str, Any]:
        return {
            ",".join(sorted(t)): f.describe()
            for t, f in sorted(self.fibers.items(), key=lambda kv: sorted(kv[0]))
        }


@dataclass
class PrimOpenSet:
    """Per-tail open fibers: a bool for point fibers, an arc set for circle fibers."""
    fibers: Dict[Tail, Union[bool, TorusSet]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        out = {}
        for t, f in sorted(self.fibers.items(), key=lambda kv: sorted(kv[0])):
            out[",".join(sorted(t))] = f if isinstance(f, bool) else str(f)
        return out


@dataclass
class PointSequence:
    """Eventually periodic sequence of Prim points (tail, z)."""
    prefix: List[Tuple[Tail, TorusPoint]] = field(default_factory=list)
    tail: List[Tuple[Tail, TorusPoint]] = field(default_factory=list)
