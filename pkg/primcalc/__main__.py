"""
primcalc command-line entry point: ``python -m primcalc <command> <input> ...``
"""

import os
import sys


def main() -> None:
    """Run the command line and exit with its code."""
    try:
        from .cli import main as cli_main
    except ImportError:
        current_dir = os.path.dirname(os.path.abspath(__file__))
        parent_dir = os.path.dirname(current_dir)
        if parent_dir not in sys.path:
            sys.path.insert(0, parent_dir)
        from primcalc.cli import main as cli_main
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
