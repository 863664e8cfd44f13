#!/usr/bin/env python3
"""Reproduce one figure-style experiment (fig3 .. fig10) into an output dir.

Usage:
    python scripts/reproduce_figure.py fig7 --out results/fig7 --threads 4

Each recipe writes the CSV/JSON artifacts (sweeps, gap traces, fits,
predictions) that a plotting tool can consume; the exact grids are recorded
in the *_config.json snapshots next to the data.
"""

import argparse
import sys

from annealosc.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("figure", help="fig3 .. fig10")
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    return cli_main(["--figure", args.figure, "--out", args.out,
                     "--threads", str(args.threads)])


if __name__ == "__main__":
    sys.exit(main())
