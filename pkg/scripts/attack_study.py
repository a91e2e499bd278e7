#!/usr/bin/env python3
"""Attack-rate study: empirical success vs the 2^(-n gamma) bound.

Runs the substitute-codeword and heavy-noise attackers against the binary
scheme and the codeword-substitution forger against the public-key
wrapper; prints one line per run and writes the JSON results to out/.
"""

import json
import pathlib
import sys

from authdist.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"


def run() -> int:
    OUT.mkdir(exist_ok=True)
    runs = [
        ("bin_substitute.json",
         ["sim", "binary", "--n", "16", "--tau", "0.2", "--gamma", "0.25",
          "--p", "0.08", "--delta", "0.12", "--trials", "20000",
          "--seed", "11", "--seed-secret", "22",
          "--attacker", "substitute_codeword"]),
        ("bin_heavy_noise.json",
         ["sim", "binary", "--n", "32", "--tau", "0.2", "--gamma", "0.1",
          "--p", "0.08", "--delta", "0.12", "--trials", "20000",
          "--seed", "11", "--seed-secret", "22",
          "--attacker", "heavy_noise", "--attack-p", "0.4"]),
        ("pk_forgery.json",
         ["sim", "pk", "--n", "16", "--tau", "0.2", "--gamma", "0.25",
          "--p", "0.0", "--delta", "0.12", "--trials", "20000",
          "--seed", "11", "--seed-secret", "22",
          "--attacker", "substitute_codeword", "--tag-bits", "64"]),
    ]
    for name, argv in runs:
        path = OUT / name
        rc = main(argv + ["--out", str(path)])
        if rc != 0:
            return rc
        doc = json.loads(path.read_text())
        print(f"{name}: attack_rate={doc['results']['attack_rate']:.5f} "
              f"ci95={doc['results']['attack_rate_ci95']}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
