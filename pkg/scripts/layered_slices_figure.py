#!/usr/bin/env python3
"""Two-layer region slices at SNR 30 dB, harsh-edit excess 10 dB.

One slice per encoding-distortion level De/sigma_n2 in {10,5,0,-5,-10} dB,
plus the time-sharing baseline rows.
"""

import pathlib
import sys

from authdist.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"


def run() -> int:
    OUT.mkdir(exist_ok=True)
    path = OUT / "layered_slices.csv"
    argv = ["region-layered", "--snr-db", "30", "--sigma-v-db", "10"]
    for de_db in (10, 5, 0, -5, -10):
        argv += ["--de-db", str(de_db)]
    argv += ["--resolution", "80", "--out", str(path)]
    rc = main(argv)
    print(f"-> {path}")
    return rc


if __name__ == "__main__":
    sys.exit(run())
