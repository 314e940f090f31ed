#!/usr/bin/env python3
"""Run every named preset and write its artifact set under one root.

Usage: python scripts/run_all_presets.py [--out runs] [--format csv+svg]
"""

import argparse
import sys
import time
from pathlib import Path

from nhlattice import PRESETS
from nhlattice.cli import main as cli_main

SUBCOMMANDS = {
    "dispersion_scan": "dispersion",
    "transport_single_site": "transport",
    "transport_gaussian": "transport",
    "storage": "storage",
    "reduction_check": "reduce-check",
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs", help="output root (default: runs/)")
    parser.add_argument("--format", default="csv+svg", choices=("csv", "csv+svg"))
    args = parser.parse_args()

    root = Path(args.out)
    failures = 0
    for name, config in PRESETS.items():
        sub = SUBCOMMANDS[config.experiment]
        out_dir = root / name
        t0 = time.perf_counter()
        code = cli_main([sub, "--preset", name, "--out", str(out_dir),
                         "--format", args.format])
        elapsed = time.perf_counter() - t0
        status = "ok" if code == 0 else f"exit {code}"
        print(f"{name:10s} {config.experiment:22s} {elapsed:6.1f}s  {status}")
        failures += code != 0
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
