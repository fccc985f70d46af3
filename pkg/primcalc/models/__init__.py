"""
Models package for primcalc.
Contains the dataclasses and enums every computation passes around.
"""

from .lattice import IntLattice, TorusPoint, AdaptedChart, SymbolicSequence
from .torus import TorusSet, ClosedSubgroupT
from .graph import (DirGraph, Edge, PathPoint, MaximalTail, PrimPresentation, ClosedFiber,
                    ClosedPresentation, PrimOpenSet, PointSequence)
from .kgraph import Color, KEdge, Square, TwoGraph, KPath, LocalPeriodicity, PathClass, ClassTable
from .bisection import Atom, Bisection, TwoGraphPoint, EssIsotropy, HarmoniousFamily
from .dset import DSet, ClassFibers
from .repsim import SmoothBump, FourierSeries, CcFunction, OrbitElement, TruncatedOrbit
from .report import Check, CheckStatus, Report
from .settings import PrimcalcSettings, get_settings

__all__ = [
    'IntLattice',
    'TorusPoint',
    'AdaptedChart',
    'SymbolicSequence',
    'TorusSet',
    'ClosedSubgroupT',
    'DirGraph',
    'Edge',
    'PathPoint',
    'MaximalTail',
    'PrimPresentation',
    'ClosedFiber',
    'ClosedPresentation',
    'PrimOpenSet',
    'PointSequence',
    'Color',
    'KEdge',
    'Square',
    'TwoGraph',
    'KPath',
    'LocalPeriodicity',
    'PathClass',
    'ClassTable',
    'Atom',
    'Bisection',
    'TwoGraphPoint',
    'EssIsotropy',
    'HarmoniousFamily',
    'DSet',
    'ClassFibers',
    'SmoothBump',
    'FourierSeries',
    'CcFunction',
    'OrbitElement',
    'TruncatedOrbit',
    'Check',
    'CheckStatus',
    'Report',
    'PrimcalcSettings',
    'get_settings',
]
