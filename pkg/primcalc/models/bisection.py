"""
Compact open bisections given by finite unions of path-pair atoms, and
harmonious families built from them.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Tuple, Union

from .graph import DirGraph, PathPoint
from .kgraph import KPath, TwoGraph
from .lattice import IntLattice, Vector

Space = Union[DirGraph, TwoGraph]


@dataclass(frozen=True)
class Atom:
    """Z(lam, rho) = {(lam z, d(lam) - d(rho), rho z)}; requires s(lam) = s(rho)."""
    lam: KPath
    rho: KPath

    def to_dict(self) -> Dict[str, Any]:
        return {'lam': str(self.lam), 'rho': str(self.rho)}

    def __str__(self) -> str:
        return f"Z({self.lam}, {self.rho})"


@dataclass(frozen=True)
class Bisection:
    """A homogeneous bisection: atoms sharing the cocycle value."""
    atoms: FrozenSet[Atom]
    cocycle: Vector

    @property
    def k(self) -> int:
        return len(self.cocycle)

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    def sorted_atoms(self) -> List[Atom]:
        return sorted(self.atoms, key=lambda a: (a.lam.word(), a.rho.word(), a.lam.range))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'cocycle': list(self.cocycle),
            'atoms': [a.to_dict() for a in self.sorted_atoms()],
        }

    def __str__(self) -> str:
        return " u ".join(str(a) for a in self.sorted_atoms()) or "0"


@dataclass(frozen=True)
class TwoGraphPoint:
    """prefix . y where y is the unique infinite path at s(prefix) using only ``edges``.

    ``edges`` of None means the whole graph, which must be deterministic past
    the prefix.
    """
    prefix: KPath
    edges: Optional[FrozenSet[str]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'prefix': self.prefix.to_dict(),
            'edges': sorted(self.edges) if self.edges is not None else None,
        }

    def __str__(self) -> str:
        tail = "*" if self.edges is None else "{" + ",".join(sorted(self.edges)) + "}"
        return f"{self.prefix}.{tail}^inf"


BasePoint = Union[PathPoint, TwoGraphPoint]


@dataclass(frozen=True)
class EssPoint:
    """The essential isotropy element (x, cocycle, x)."""
    point: BasePoint
    cocycle: Vector

    def to_dict(self) -> Dict[str, Any]:
        return {'point': str(self.point), 'cocycle': list(self.cocycle)}


@dataclass
class EssIsotropy:
    """B intersected with the essential isotropy: unit cylinders plus isolated points."""
    units: List[KPath] = field(default_factory=list)
    points: List[EssPoint] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.units and not self.points

    def to_dict(self) -> Dict[str, Any]:
        return {
            'units': [str(u) for u in self.units],
            'points': [p.to_dict() for p in self.points],
        }


@dataclass
class HarmoniousFamily:
    """Generators of a family (B_h) indexed by the group J at a base point.

    Members are products of generator powers; ``overrides`` replaces single
    members, ``conjugator`` C turns every member into C B_h C^-1.
    """
    space: Space
    base: BasePoint
    group: IntLattice
    generators: List[Tuple[Vector, Bisection]] = field(default_factory=list)
    unit: Optional[Bisection] = None
    shift: Vector = ()
    conjugator: Optional[Bisection] = None
    overrides: Dict[Vector, Bisection] = field(default_factory=dict)
    certified: str = "exact"

    @property
    def k(self) -> int:
        return self.group.ambient_rank

    @property
    def rank(self) -> int:
        return len(self.generators)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'space': self.space.name,
            'base': str(self.base),
            'J': self.group.to_dict(),
            'generators': [{'h': list(h), 'bisection': b.to_dict()} for h, b in self.generators],
            'shift': list(self.shift),
            'conjugator': self.conjugator.to_dict() if self.conjugator else None,
            'certified': self.certified,
        }
