#!/usr/bin/env python3
"""End-to-end desk-scale campaign: table, evaluation, diagnostics, baseline.

Produces a complete run directory (default runs/desk) whose CSV outputs
feed the figures package:

    python scripts/run_desk_campaign.py --out runs/desk --seed 1
    python ../figures/scripts/make_all.py --run-dir runs/desk --out-dir runs/desk/figs
"""

import argparse
import pathlib
import sys
import time

from glsbi.harness import (
    cmd_baseline,
    cmd_build_table,
    cmd_diagnostics,
    cmd_evaluate,
    load_config,
)

CONFIG = pathlib.Path(__file__).resolve().parent.parent / "configs" / "desk.cfg"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(CONFIG))
    parser.add_argument("--out", default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()

    cfg = load_config(
        args.config,
        overrides={"out": args.out, "seed": args.seed, "workers": args.workers},
    )
    t0 = time.time()
    table_path = cmd_build_table(cfg)
    print(f"[{time.time() - t0:7.1f}s] table: {table_path}")
    est_path, summary_path = cmd_evaluate(cfg, table_path)
    print(f"[{time.time() - t0:7.1f}s] evaluation: {est_path}, {summary_path}")
    for path in cmd_diagnostics(cfg, table_path=table_path):
        print(f"[{time.time() - t0:7.1f}s] diagnostics: {path}")
    baseline_path = cmd_baseline(cfg, s_list=[10])
    print(f"[{time.time() - t0:7.1f}s] baseline: {baseline_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
