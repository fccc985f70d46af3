"""
Utilities package for primcalc.
"""

from .error_handling import (EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_UNSUPPORTED, ErrorHandler, PrimcalcError,
                             InputError, UnsupportedError, UnanalyzableError, CheckFailure, get_logger)

__all__ = [
    'EXIT_OK',
    'EXIT_FAILED',
    'EXIT_INPUT',
    'EXIT_UNSUPPORTED',
    'ErrorHandler',
    'PrimcalcError',
    'InputError',
    'UnsupportedError',
    'UnanalyzableError',
    'CheckFailure',
    'get_logger',
]
