#!/usr/bin/env python3
"""Gaussian-quadratic bounds at the four SNRs of the comparison figure."""

import pathlib
import sys

from authdist.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"


def run() -> int:
    OUT.mkdir(exist_ok=True)
    path = OUT / "gaussian_bounds.csv"
    rc = main(["region-gaussian", "--snr-db", "-10", "--snr-db", "0",
               "--snr-db", "10", "--snr-db", "30",
               "--resolution", "200", "--out", str(path)])
    print(f"-> {path}")
    return rc


if __name__ == "__main__":
    sys.exit(run())
