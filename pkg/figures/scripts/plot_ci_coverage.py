#!/usr/bin/env python3
"""Render the ci_coverage figure; see --help for inputs."""

import sys

from figplots.cli import family_main

if __name__ == "__main__":
    sys.exit(family_main("ci_coverage"))
