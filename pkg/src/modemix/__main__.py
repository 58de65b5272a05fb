"""Entry point for running modemix as a module."""

import sys

from modemix.cli import main

__all__ = ["main"]

if __name__ == "__main__":
    sys.exit(main())
