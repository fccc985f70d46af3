"""
Rank-two graphs given by a coloured skeleton and factorisation squares.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from .lattice import IntLattice

Degree = Tuple[int, int]


class Color(Enum):
    """Edge colour: blue has degree (1,0), red has degree (0,1)."""
    BLUE = "blue"
    RED = "red"


@dataclass(frozen=True)
class KEdge:
    name: str
    color: Color
    range: str
    source: str

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'color': self.color.value,
                'range': self.range, 'source': self.source}


@dataclass(frozen=True)
class Square:
    """The factorisation rule blue . red = red2 . blue2."""
    blue: str
    red: str
    red2: str
    blue2: str

    def to_dict(self) -> Dict[str, Any]:
        return {'blue': self.blue, 'red': self.red, 'red2': self.red2, 'blue2': self.blue2}

    def __str__(self) -> str:
        return f"{self.blue}{self.red}={self.red2}{self.blue2}"


@dataclass
class TwoGraph:
    """A finite 2-graph. Paths run from range to source in both colours."""
    name: str
    vertices: List[str] = field(default_factory=list)
    edges: List[KEdge] = field(default_factory=list)
    squares: List[Square] = field(default_factory=list)

    def edge(self, name: str) -> KEdge:
        for e in self.edges:
            if e.name == name:
                return e
        raise KeyError(name)

    def colored(self, color: Color) -> List[KEdge]:
        return [e for e in self.edges if e.color is color]

    def edges_into(self, v: str, color: Color) -> List[KEdge]:
        return sorted((e for e in self.edges if e.color is color and e.range == v),
                      key=lambda e: e.name)

    def square_map(self) -> Dict[Tuple[str, str], Tuple[str, str]]:
        """(blue, red) -> (red2, blue2)."""
        return {(s.blue, s.red): (s.red2, s.blue2) for s in self.squares}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'vertices': list(self.vertices),
            'edges': [e.to_dict() for e in self.edges],
            'squares': [s.to_dict() for s in self.squares],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TwoGraph':
        return cls(
            name=data.get('name', 'kgraph'),
            vertices=list(data.get('vertices', [])),
            edges=[KEdge(e['name'], Color(e['color']), e['range'], e['source'])
                   for e in data.get('edges', [])],
            squares=[Square(s['blue'], s['red'], s['red2'], s['blue2'])
                     for s in data.get('squares', [])],
        )


@dataclass(frozen=True)
class KPath:
    """A finite path in blue-before-red normal form."""
    blue: Tuple[str, ...]
    red: Tuple[str, ...]
    range: str
    source: str

    @property
    def degree(self) -> Degree:
        return (len(self.blue), len(self.red))

    def word(self) -> Tuple[str, ...]:
        return self.blue + self.red

    def to_dict(self) -> Dict[str, Any]:
        return {'blue': list(self.blue), 'red': list(self.red),
                'range': self.range, 'source': self.source,
                'degree': list(self.degree)}

    def __str__(self) -> str:
        return ".".join(self.word()) or self.range


@dataclass
class LocalPeriodicity:
    """Outcome of a bounded local periodicity search at one vertex."""
    vertex: str
    bound: int
    depth: int
    pairs: List[Tuple[Degree, Degree]] = field(default_factory=list)
    group: Optional[IntLattice] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'vertex': self.vertex,
            'bound': self.bound,
            'depth': self.depth,
            'pairs': [[list(m), list(n)] for m, n in self.pairs],
            'group': self.group.to_dict() if self.group else None,
            'verified': f"verified to depth {self.depth}",
        }


@dataclass
class PathClass:
    """A class of infinite paths eventually living in one strongly connected core."""
    name: str
    core: FrozenSet[str]
    group: IntLattice
    trace: FrozenSet[str] = frozenset()
    certified: str = "exact"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'core': sorted(self.core),
            'H': [list(b) for b in self.group.basis],
            'trace': sorted(self.trace),
            'certified': self.certified,
        }


@dataclass
class ClassTable:
    """Finite encoding of path classes with accumulation and shared groups."""
    classes: List[PathClass] = field(default_factory=list)
    acc: Dict[int, List[int]] = field(default_factory=dict)
    hshare: Dict[Tuple[int, int], IntLattice] = field(default_factory=dict)
    uncertified: List[Tuple[int, int]] = field(default_factory=list)

    def index(self, name: str) -> int:
        for i, c in enumerate(self.classes):
            if c.name == name:
                return i
        raise KeyError(name)

    def classes_at(self, vertex: str) -> List[int]:
        """Classes whose paths can start at the vertex."""
        return [i for i, c in enumerate(self.classes) if vertex in c.trace]

    def shared(self, x: int, y: int) -> IntLattice:
        return self.hshare.get((x, y), self.classes[y].group)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'classes': [c.to_dict() for c in self.classes],
            'acc': [self.acc.get(i, []) for i in range(len(self.classes))],
            'hshare': [
                {'x': x, 'y': y, 'H': [list(b) for b in lat.basis]}
                for (x, y), lat in sorted(self.hshare.items())
            ],
            'uncertified': [list(p) for p in self.uncertified],
        }
