"""
Open subsets and closed subgroups of the circle and the 2-torus.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

from .lattice import TorusPoint, Vector

Arc = Tuple[Fraction, Fraction]
Polygon = Tuple[Tuple[Fraction, Fraction], ...]
Atom = Union[Arc, Polygon]


@dataclass(frozen=True, eq=False)
class TorusSet:
    """A regular open subset of T^1 or T^2.

    For k = 1 the atoms are sorted, pairwise non-touching open intervals of
    [0,1]; (0, a) and (b, 1) together wrap through 0. For k = 2 the atoms
    are open convex polygons inside the unit square, possibly overlapping.
    Equality compares regularizations, so values are unhashable.
    """
    dimension: int
    atoms: Tuple[Atom, ...] = ()

    __hash__ = None

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TorusSet):
            return NotImplemented
        from ..services import torusgeo
        return torusgeo.equal(self, other)

    def __le__(self, other: 'TorusSet') -> bool:
        from ..services import torusgeo
        return torusgeo.subset(self, other)

    def __or__(self, other: 'TorusSet') -> 'TorusSet':
        from ..services import torusgeo
        return torusgeo.union(self, other)

    def __and__(self, other: 'TorusSet') -> 'TorusSet':
        from ..services import torusgeo
        return torusgeo.intersect(self, other)

    def __contains__(self, z: TorusPoint) -> bool:
        from ..services import torusgeo
        return torusgeo.member(z, self)

    def __str__(self) -> str:
        from ..services import torusgeo
        return torusgeo.render(self)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        if self.dimension == 1:
            atoms = [[str(a), str(b)] for a, b in self.atoms]
        else:
            atoms = [[[str(x), str(y)] for x, y in poly] for poly in self.atoms]
        return {'dimension': self.dimension, 'atoms': atoms}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TorusSet':
        """Create from dictionary."""
        from ..services import torusgeo
        k = data['dimension']
        if k == 1:
            return torusgeo.from_arcs([(Fraction(a), Fraction(b)) for a, b in data['atoms']])
        polys = [tuple((Fraction(x), Fraction(y)) for x, y in poly) for poly in data['atoms']]
        return torusgeo.from_polygons(polys)


class ConnectedPart(Enum):
    """Identity component of a closed subgroup of T^k (k <= 2)."""
    TRIVIAL = "trivial"
    CIRCLE = "circle"
    FULL = "full"


@dataclass(frozen=True)
class ClosedSubgroupT:
    """A closed subgroup of T^k: finite part times an identity component."""
    dimension: int
    points: Tuple[TorusPoint, ...] = ()
    connected: ConnectedPart = ConnectedPart.TRIVIAL
    direction: Optional[Vector] = None

    @property
    def order(self) -> Optional[int]:
        """Number of elements for a finite subgroup."""
        if self.connected is ConnectedPart.TRIVIAL:
            return len(self.points)
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dimension': self.dimension,
            'points': [p.to_dict()['angles'] for p in self.points],
            'connected': self.connected.value,
            'direction': list(self.direction) if self.direction else None,
        }
