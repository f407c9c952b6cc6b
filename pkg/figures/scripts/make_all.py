#!/usr/bin/env python3
"""Render every figure family available in a run directory."""

import sys

from figplots.cli import make_all_main

if __name__ == "__main__":
    sys.exit(make_all_main())
