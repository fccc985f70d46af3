"""
Integer lattices, rational torus points and adapted coordinates.
"""

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple, Union

Vector = Tuple[int, ...]
Rational = Union[int, str, Fraction]


@dataclass(frozen=True)
class IntLattice:
    """A subgroup of Z^k stored by its row Hermite normal form.

    Build values through ``services.zklattice.canonicalize``; the constructor
    does not normalize.
    """
    ambient_rank: int
    basis: Tuple[Vector, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_zero(self) -> bool:
        return not self.basis

    @property
    def is_full(self) -> bool:
        return self.rank == self.ambient_rank

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            'ambient_rank': self.ambient_rank,
            'basis': [list(row) for row in self.basis],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'IntLattice':
        """Create from dictionary (re-canonicalized)."""
        from ..services.zklattice import canonicalize
        return canonicalize(data.get('basis', []), data['ambient_rank'])

    def __str__(self) -> str:
        if not self.basis:
            return f"0 < Z^{self.ambient_rank}"
        rows = ", ".join("(" + ",".join(str(x) for x in row) + ")" for row in self.basis)
        return f"span{{{rows}}}"


def to_fraction(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class TorusPoint:
    """A rational point of T^k given by its angles in [0,1)."""
    angles: Tuple[Fraction, ...]

    def __post_init__(self):
        reduced = tuple(to_fraction(a) % 1 for a in self.angles)
        object.__setattr__(self, 'angles', reduced)

    @classmethod
    def of(cls, *angles: Rational) -> 'TorusPoint':
        return cls(tuple(to_fraction(a) for a in angles))

    @classmethod
    def zero(cls, k: int) -> 'TorusPoint':
        return cls((Fraction(0),) * k)

    @property
    def dimension(self) -> int:
        return len(self.angles)

    def __add__(self, other: 'TorusPoint') -> 'TorusPoint':
        return TorusPoint(tuple(a + b for a, b in zip(self.angles, other.angles)))

    def __sub__(self, other: 'TorusPoint') -> 'TorusPoint':
        return TorusPoint(tuple(a - b for a, b in zip(self.angles, other.angles)))

    def __neg__(self) -> 'TorusPoint':
        return TorusPoint(tuple(-a for a in self.angles))

    def power(self, n: int) -> 'TorusPoint':
        """z^n, i.e. the angles scaled by n."""
        return TorusPoint(tuple(n * a for a in self.angles))

    def to_complex(self) -> List[complex]:
        return [cmath.exp(2j * cmath.pi * float(a)) for a in self.angles]

    def to_dict(self) -> Dict[str, Any]:
        return {'angles': [str(a) for a in self.angles]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TorusPoint':
        return cls.of(*data.get('angles', []))

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.angles) + ")"


@dataclass(frozen=True)
class AdaptedChart:
    """Coordinates in which a lattice is diagonal.

    ``transform`` is the unimodular P with L = P * (d_1 Z + ... + d_r Z + 0);
    ``dual`` is P^{-T}, so the annihilator is dual * ((1/d_i)Z/Z x ... x T^{k-r}).
    """
    transform: Tuple[Vector, ...]
    divisors: Tuple[int, ...]
    free_rank: int
    dual: Tuple[Vector, ...] = ()

    @property
    def ambient_rank(self) -> int:
        return len(self.transform)

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.transform)

    def dual_column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.dual)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'transform': [list(r) for r in self.transform],
            'divisors': list(self.divisors),
            'free_rank': self.free_rank,
            'dual': [list(r) for r in self.dual],
        }


@dataclass
class SymbolicSequence:
    """A finite prefix followed by a repeating tail of (point, lattice) pairs."""
    prefix: List[Tuple[TorusPoint, IntLattice]] = field(default_factory=list)
    tail: List[Tuple[TorusPoint, IntLattice]] = field(default_factory=list)

    def term(self, n: int) -> Tuple[TorusPoint, IntLattice]:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.tail[(n - len(self.prefix)) % len(self.tail)]

    def terms(self, count: int) -> List[Tuple[TorusPoint, IntLattice]]:
        return [self.term(n) for n in range(count)]


def as_vectors(generators: Sequence[Sequence[int]]) -> List[Vector]:
    return [tuple(int(x) for x in g) for g in generators]
