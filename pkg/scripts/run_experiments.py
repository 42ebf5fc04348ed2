#!/usr/bin/env python3
"""Run the full default experiment: checks, threshold search, both solvers.

Writes everything under out/ (one subdirectory per stage) and prints a short
summary.  Equivalent to calling the CLI four times with scripts/default.cfg.
"""
import sys
from pathlib import Path

from doublephase.cli import main

CONFIG = Path(__file__).parent / "default.cfg"
OUT = Path("out")

STAGES = ["verify", "lambda-star", "solve-min", "solve-mp"]

if __name__ == "__main__":
    codes = {}
    for stage in STAGES:
        print(f"=== {stage} ===")
        codes[stage] = main(
            [stage, "--config", str(CONFIG), "--out", str(OUT / stage.replace("-", "_"))]
        )
    print("\nsummary:")
    for stage, code in codes.items():
        print(f"  {stage}: {'ok' if code == 0 else f'exit {code}'}")
    sys.exit(max(codes.values()))
