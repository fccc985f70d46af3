"""
Numerical objects: smooth bumps and their Fourier series, finitely supported
functions on the groupoid, and truncated orbits.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

from .bisection import Atom, BasePoint, Space
from .graph import PathPoint
from .kgraph import TwoGraph
from .lattice import Vector

Arc = Tuple[Fraction, Fraction]
Weight = Union[Fraction, complex, float]


@dataclass(frozen=True)
class SmoothBump:
    """Product of one-variable bumps; an axis with arc None is the constant 1."""
    arcs: Tuple[Optional[Arc], ...]

    @property
    def k(self) -> int:
        return len(self.arcs)

    def to_dict(self) -> Dict[str, Any]:
        return {'arcs': [None if a is None else [str(a[0]), str(a[1])] for a in self.arcs]}


@dataclass
class FourierSeries:
    """Coefficients on the box |h| <= bound of Z^k.

    ``decay`` is the largest coefficient modulus seen outside the box,
    ``tail`` their sum, ``aliasing`` the largest modulus near the Nyquist
    frequency of the sampling grid.
    """
    k: int
    bound: int
    coefficients: Dict[Vector, complex] = field(default_factory=dict)
    decay: float = 0.0
    tail: float = 0.0
    aliasing: float = 0.0
    grid: int = 0

    def coefficient(self, h: Vector) -> complex:
        return self.coefficients.get(tuple(h), 0j)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'bound': self.bound,
            'grid': self.grid,
            'decay': self.decay,
            'tail': self.tail,
            'aliasing': self.aliasing,
            'coefficients': [
                {'h': list(h), 're': c.real, 'im': c.imag}
                for h, c in sorted(self.coefficients.items())
            ],
        }


@dataclass
class CcFunction:
    """A finite weighted sum of atom indicators."""
    space: Space
    terms: List[Tuple[Atom, Weight]] = field(default_factory=list)

    def degree(self, atom: Atom) -> Vector:
        return tuple(a - b for a, b in zip(atom.lam.degree, atom.rho.degree))[:self.k]

    @property
    def k(self) -> int:
        return 2 if isinstance(self.space, TwoGraph) else 1

    def degrees(self) -> List[Vector]:
        return sorted({self.degree(a) for a, _ in self.terms})

    def to_dict(self) -> Dict[str, Any]:
        return {
            'terms': [
                {'atom': a.to_dict(), 'degree': list(self.degree(a)), 'weight': str(w)}
                for a, w in self.terms
            ],
        }


@dataclass(frozen=True)
class OrbitElement:
    """The arrow (point, lag, base) of the orbit of a base path."""
    point: BasePoint
    lag: Vector

    def __str__(self) -> str:
        return f"({self.point}, {self.lag})"


@dataclass
class TruncatedOrbit:
    """Arrows into a base path whose connecting words have length at most ``radius``."""
    base: PathPoint
    radius: int
    elements: List[OrbitElement] = field(default_factory=list)

    @property
    def unit(self) -> OrbitElement:
        return OrbitElement(self.base, (0,))

    def __contains__(self, xi: OrbitElement) -> bool:
        return xi in self.elements

    def to_dict(self) -> Dict[str, Any]:
        return {
            'base': str(self.base),
            'radius': self.radius,
            'elements': [str(xi) for xi in self.elements],
        }
