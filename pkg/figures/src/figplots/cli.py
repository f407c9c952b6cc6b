"""Shared argument handling for the one-script-per-family entry points.

Exit codes: 0 success (including empty-but-valid inputs), 2 schema error,
4 missing/unreadable input file.
"""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import FIGURE_FAMILIES, FigureSpec, enumerate_specs, render


def family_main(family: str, argv: list[str] | None = None) -> int:
    _, default_inputs = FIGURE_FAMILIES[family]
    parser = argparse.ArgumentParser(
        description=f"Render the {family} figure from glsbi output files"
    )
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        help=f"input file(s), in order: {', '.join(default_inputs)}",
    )
    parser.add_argument("--out", required=True, help="output PNG path")
    args = parser.parse_args(argv)
    try:
        path = render(FigureSpec(family=family, inputs=args.inputs, output=args.out))
        print(path)
    except SchemaError as exc:
        print(f"figplots: schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"figplots: cannot read input: {exc}", file=sys.stderr)
        return 4
    return 0


def make_all_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Render every figure whose inputs exist in a run directory"
    )
    parser.add_argument("--run-dir", required=True)
    parser.add_argument("--out-dir", required=True)
    args = parser.parse_args(argv)
    import os

    os.makedirs(args.out_dir, exist_ok=True)
    specs = enumerate_specs(args.run_dir, args.out_dir)
    if not specs:
        print(f"figplots: no renderable inputs found in {args.run_dir}", file=sys.stderr)
        return 4
    status = 0
    for spec in specs:
        try:
            print(render(spec))
        except SchemaError as exc:
            print(f"figplots: schema error: {exc}", file=sys.stderr)
            status = 2
    return status
