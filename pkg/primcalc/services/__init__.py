"""
Services package for primcalc.
Contains the algorithms, the text-format parsers and the exporters.
"""

from . import zklattice, torusgeo, graphalg, kgraph2, bisect, dset, repsim, parsers, export

__all__ = [
    'zklattice',
    'torusgeo',
    'graphalg',
    'kgraph2',
    'bisect',
    'dset',
    'repsim',
    'parsers',
    'export',
]
