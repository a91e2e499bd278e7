#!/usr/bin/env python3
"""Binary-Hamming region data: frontier, quantize-and-embed, no-auth line.

Writes out/binary_region_p*.csv for the four crossover probabilities of
the quantize-and-embed comparison plus the main p=0.2 region.
"""

import pathlib
import sys

from authdist.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"


def run() -> int:
    OUT.mkdir(exist_ok=True)
    for p in (0.05, 0.10, 0.15, 0.20):
        rc = main(["region-binary", "--p", str(p), "--resolution", "500",
                   "--out", str(OUT / f"binary_region_p{p:.2f}.csv")])
        if rc != 0:
            return rc
        print(f"p={p:.2f} -> {OUT / f'binary_region_p{p:.2f}.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
