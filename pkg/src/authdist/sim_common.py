"""Shared trial-statistics types and RNG plumbing for the simulators.

Randomness discipline: every consumer derives its generator from a
``SeedSequence`` with an explicit spawn key, so a (config, seeds) pair maps
to bit-identical results no matter how trials are batched:

- ``(seed_public, (0,))``   codebook generation
- ``(seed_secret, (0,))``   admissibility marking
- ``(seed_public, (1, t))`` source and reference-channel noise of trial t
- ``(seed_public, (2, t))`` attacker randomness of trial t (public knowledge)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CODEBOOK_KEY = 0
TRIAL_KEY = 1
ATTACK_KEY = 2


def stream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for (seed, spawn key)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


@dataclass(frozen=True)
class DecodeOutcome:
    """Either an authentic reconstruction or the not-authentic verdict.

    ``codeword_index is None`` iff the decoder declared the input
    unauthenticatable; in that case there is no reconstruction.
    """

    reconstruction: np.ndarray | None
    codeword_index: int | None

    def __post_init__(self):
        if (self.reconstruction is None) != (self.codeword_index is None):
            raise ValueError("reconstruction and codeword_index must be both set or both absent")

    @property
    def authentic(self) -> bool:
        return self.codeword_index is not None

    @classmethod
    def not_authentic(cls) -> "DecodeOutcome":
        return cls(None, None)


@dataclass(frozen=True)
class TrialStats:
    """Aggregated Monte Carlo outcomes for one simulator run.

    ``decode_failures`` counts trials where the decoder declared
    not-authentic; ``wrong_codeword`` counts trials where it produced a
    reconstruction different from the encoder's (the successful-attack
    event class, whatever channel was in effect).  ``dr_de_max_gap`` is
    the largest per-trial difference |d_r - d_e| over trials that
    recovered the encoder's codeword; zero means the reconstruction
    distortion is identically the encoding distortion on those trials.
    """

    trials_run: int
    encode_failures: int
    decode_failures: int
    wrong_codeword: int
    matched: int
    empirical_de: float
    empirical_dr: float
    dr_de_max_gap: float
    attack_successes: int
    attack_trials: int
    tag_recoveries: int = 0

    def __post_init__(self):
        counts = (self.encode_failures, self.decode_failures, self.wrong_codeword,
                  self.matched, self.attack_successes, self.attack_trials)
        if any(c < 0 or c > self.trials_run for c in counts):
            raise ValueError("counts must lie in [0, trials_run]")

    @property
    def attack_rate(self) -> float:
        return self.attack_successes / self.attack_trials if self.attack_trials else 0.0

    @property
    def failure_rate(self) -> float:
        """Encoder failures plus decoder-declared failures, per trial."""
        return (self.encode_failures + self.decode_failures) / self.trials_run

    @property
    def total_failure_rate(self) -> float:
        """Every trial that did not end with the encoder's reconstruction."""
        bad = self.encode_failures + self.decode_failures + self.wrong_codeword
        return bad / self.trials_run

    def as_dict(self) -> dict:
        return {
            "trials_run": self.trials_run,
            "encode_failures": self.encode_failures,
            "decode_failures": self.decode_failures,
            "wrong_codeword": self.wrong_codeword,
            "matched": self.matched,
            "empirical_de": self.empirical_de,
            "empirical_dr": self.empirical_dr,
            "dr_de_max_gap": self.dr_de_max_gap,
            "attack_successes": self.attack_successes,
            "attack_trials": self.attack_trials,
            "tag_recoveries": self.tag_recoveries,
        }


def binomial_sigma(rate: float, trials: int) -> float:
    """Standard deviation of an empirical rate over the given trial count."""
    if trials <= 0:
        return 0.0
    return math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)
