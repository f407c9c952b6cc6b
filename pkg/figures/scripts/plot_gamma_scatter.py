#!/usr/bin/env python3
"""Render the gamma_scatter figure; see --help for inputs."""

import sys

from figplots.cli import family_main

if __name__ == "__main__":
    sys.exit(family_main("gamma_scatter"))
