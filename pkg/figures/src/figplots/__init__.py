"""Figure generation for glsbi simulation campaigns.

Consumes the documented run-directory file formats (evaluation CSVs,
diagnostics CSVs, sampling-distribution tables) and renders
publication-style PNG figures; no statistics are recomputed here.
"""

from .io import SchemaError, read_csv, read_table
from .render import FIGURE_FAMILIES, FigureSpec, enumerate_specs, render

__version__ = "0.1.0"
