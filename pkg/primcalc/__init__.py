"""primcalc package.

Exact symbolic computations on primitive ideal spaces of graph and 2-graph
C*-algebras: maximal tails and Prim presentations, integer lattices and
torus sets, 2-graph periodicity, harmonious bisection families, D-set
checks and numerical representation identities. Includes a CLI entrypoint
via ``python -m primcalc``.
"""

try:
    # Try relative import first (for package usage)
    from .models.report import Check, CheckStatus, Report
    from .models.settings import PrimcalcSettings, get_settings
    from .services import bisect, dset, export, graphalg, kgraph2, parsers, repsim, torusgeo, zklattice
    from .utils.error_handling import (CheckFailure, InputError, PrimcalcError, UnanalyzableError,
                                       UnsupportedError)
except ImportError:
    from primcalc.models.report import Check, CheckStatus, Report
    from primcalc.models.settings import PrimcalcSettings, get_settings
    from primcalc.services import bisect, dset, export, graphalg, kgraph2, parsers, repsim, torusgeo, zklattice
    from primcalc.utils.error_handling import (CheckFailure, InputError, PrimcalcError, UnanalyzableError,
                                               UnsupportedError)

__all__ = [
    "Check",
    "CheckStatus",
    "Report",
    "PrimcalcSettings",
    "get_settings",
    "zklattice",
    "torusgeo",
    "graphalg",
    "kgraph2",
    "bisect",
    "dset",
    "repsim",
    "parsers",
    "export",
    "PrimcalcError",
    "InputError",
    "UnsupportedError",
    "UnanalyzableError",
    "CheckFailure",
]

__version__ = "0.1.0"
