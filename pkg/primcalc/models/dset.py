"""
D-sets: one open subset of T^2 per vertex of a 2-graph.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

from .torus import TorusSet


@dataclass
class DSet:
    """A candidate ideal given vertexwise."""
    fibers: Dict[str, TorusSet] = field(default_factory=dict)

    def vertices(self) -> List[str]:
        return sorted(self.fibers)

    def to_dict(self) -> Dict[str, Any]:
        return {v: str(self.fibers[v]) for v in self.vertices()}


@dataclass
class ClassFibers:
    """A subset of the path space presented classwise: one open set per path class."""
    fibers: Dict[str, TorusSet] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {name: str(s) for name, s in sorted(self.fibers.items())}
