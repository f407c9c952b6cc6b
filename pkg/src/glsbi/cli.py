"""Command line interface.

Subcommands: build-table, estimate, evaluate, diagnostics, baseline.
Configuration comes from a flat key=value file (--config) with CLI flags
taking precedence.  Exit codes: 0 success, 2 configuration error,
3 numeric/degenerate failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import NumericError, ParameterError


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--seed", type=int, help="root seed (64-bit unsigned)")
    parser.add_argument("--workers", type=int, help="parallel worker count")
    parser.add_argument("--out", help="output directory")
    parser.add_argument(
        "--kind", choices=["spikefreq", "alpha"], help="statistic kind"
    )
    parser.add_argument(
        "--estimator", choices=["gaussian", "histogram"], help="density estimator"
    )


def _grid_triplet(text: str) -> tuple[float, float, int]:
    try:
        start, step, count = text.split(":")
        return float(start), float(step), int(count)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected start:step:count, got {text!r}"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glsbi",
        description="Infer the connection probability of a directed ER spiking network",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-table", help="build the sampling-distribution table")
    _add_common(p)
    p.add_argument("--grid", type=_grid_triplet, metavar="START:STEP:COUNT")
    p.add_argument("--bins", type=int, help="histogram bin count (0 = auto)")

    p = sub.add_parser("estimate", help="estimate p for one observation file")
    _add_common(p)
    p.add_argument("--table", required=True, help="sampling-distribution table file")
    p.add_argument("--spikes", help="spike dump file (`# T:` header or --horizon)")
    p.add_argument("--values", help="statistic values file, one per line")
    p.add_argument("--horizon", type=int, help="record horizon for --spikes")
    p.add_argument("--level", type=float, help="confidence level")

    p = sub.add_parser("evaluate", help="estimation error sweep over truth values")
    _add_common(p)
    p.add_argument("--table", required=True)
    p.add_argument("--eval-grid", type=_grid_triplet, metavar="START:STEP:COUNT")
    p.add_argument("--n-estimations", type=int)
    p.add_argument("--sample-size", type=int, dest="s", help="trains per estimation")
    p.add_argument("--level", type=float)
    p.add_argument("--remove-reciprocal", action="store_true", default=None)

    p = sub.add_parser("diagnostics", help="independence/Gaussianity diagnostics")
    _add_common(p)
    p.add_argument("--table", help="enables the deviance Q-Q dataset")
    p.add_argument("--diag-points", help="comma-separated p values")
    p.add_argument("--dump-spikes", action="store_true")

    p = sub.add_parser("baseline", help="analytic graph-reconstruction error floor")
    _add_common(p)
    p.add_argument("--eval-grid", type=_grid_triplet, metavar="START:STEP:COUNT")
    p.add_argument(
        "--sample-sizes", help="comma-separated s values (default: config s)"
    )

    return parser


def _config_from_args(args: argparse.Namespace) -> harness.CampaignConfig:
    overrides: dict = {}
    for key in (
        "seed",
        "workers",
        "out",
        "kind",
        "estimator",
        "bins",
        "level",
        "n_estimations",
        "s",
        "diag_points",
        "remove_reciprocal",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    grid = getattr(args, "grid", None)
    if grid is not None:
        overrides["grid_start"], overrides["grid_step"], overrides["grid_count"] = grid
    eval_grid = getattr(args, "eval_grid", None)
    if eval_grid is not None:
        (
            overrides["eval_start"],
            overrides["eval_step"],
            overrides["eval_count"],
        ) = eval_grid
    return harness.load_config(args.config, overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "build-table":
            path = harness.cmd_build_table(cfg)
            print(path)
        elif args.command == "estimate":
            result = harness.cmd_estimate(
                cfg,
                args.table,
                spikes_path=args.spikes,
                values_path=args.values,
                horizon=args.horizon,
            )
            lo, hi, level = result["ci"]
            print(
                f"p_tilde={result['p_tilde']:.6g} p_hat={result['p_hat']:.6g} "
                f"ci{level:.0%}=[{lo:.6g}, {hi:.6g}] "
                f"variant={result['kind']}_{result['estimator']} s={result['s']}"
                + (f" flags={','.join(result['flags'])}" if result["flags"] else "")
            )
        elif args.command == "evaluate":
            est_path, summary_path = harness.cmd_evaluate(cfg, args.table)
            print(est_path)
            print(summary_path)
        elif args.command == "diagnostics":
            for path in harness.cmd_diagnostics(
                cfg, table_path=args.table, dump_spikes=args.dump_spikes
            ):
                print(path)
        elif args.command == "baseline":
            s_list = None
            if args.sample_sizes:
                s_list = [int(v) for v in args.sample_sizes.split(",")]
            print(harness.cmd_baseline(cfg, s_list=s_list))
    except ParameterError as exc:
        print(f"glsbi: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"glsbi: numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"glsbi: I/O failure: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
