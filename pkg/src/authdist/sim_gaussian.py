"""Monte Carlo of the sphere-packing construction with Gaussian codebooks.

Random i.i.d. Gaussian codewords stand in for the ideal packing: the
encoder maps the source to the nearest admissible codeword (which is also
the channel input), the decoder maps its observation to the nearest
codeword overall and rejects when it is forbidden or outside the decoding
radius sigma_n2 + epsilon per sample.  The authentic reconstruction is the
codeword itself, so reconstruction distortion equals encoding distortion
on every correctly decoded trial, and the admissible fraction 2^(-n gamma)
bounds every attacker's success probability.

Desk-scale caveat: at the blocklengths the tractability cap allows, the
empirical distortions sit well above the asymptotic sigma_n2 value; the
claims checked here are the per-trial identity, the attack bound, and
rate/blocklength trends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .sim_common import (
    ATTACK_KEY,
    CODEBOOK_KEY,
    TRIAL_KEY,
    DecodeOutcome,
    TrialStats,
    stream,
)

LOG2_GAUSS_CAP = 22.0
CHUNK = 256

GAUSS_ATTACKERS = ("substitute_codeword", "heavy_noise", "random_vector")


@dataclass(frozen=True)
class GaussSimConfig:
    n: int
    rate: float
    sigma_s2: float
    sigma_n2: float
    trials: int
    seed_public: int
    seed_secret: int
    gamma: float | None = None     # None -> 1/sqrt(n)
    epsilon: float | None = None   # None -> sigma_n2 / 4

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("blocklength must be >= 4")
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if self.n * self.rate > LOG2_GAUSS_CAP:
            raise ValueError(
                f"codebook of 2^{self.n * self.rate:.2f} codewords exceeds "
                f"the 2^{LOG2_GAUSS_CAP:.0f} tractability cap"
            )
        if not (self.sigma_s2 > 0 and self.sigma_n2 > 0):
            raise ValueError("variances must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.gamma is None:
            object.__setattr__(self, "gamma", 1.0 / math.sqrt(self.n))
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", self.sigma_n2 / 4.0)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def decode_radius(self) -> float:
        """Per-sample squared decoding radius r^2 = sigma_n2 + epsilon."""
        return self.sigma_n2 + self.epsilon


@dataclass(frozen=True)
class GaussCodebook:
    codewords: np.ndarray       # (count, n) float
    admissible: np.ndarray      # (count,) bool
    sigma_s2: float
    seed_public: int
    seed_secret: int

    def __post_init__(self):
        self.codewords.setflags(write=False)
        self.admissible.setflags(write=False)

    @property
    def n(self) -> int:
        return self.codewords.shape[1]

    @property
    def count(self) -> int:
        return self.codewords.shape[0]

    @property
    def n_admissible(self) -> int:
        return int(self.admissible.sum())

    @cached_property
    def admissible_indices(self) -> np.ndarray:
        return np.flatnonzero(self.admissible)

    @cached_property
    def _sqnorms(self) -> np.ndarray:
        return (self.codewords * self.codewords).sum(axis=1)


def build_gauss_codebook(config: GaussSimConfig) -> GaussCodebook:
    """|C| = round(2^(n rate)) i.i.d. N(0, sigma_s2) codewords; admissible
    subset of size round(2^(n (rate - gamma))) from the secret stream."""
    count = round(2.0 ** (config.n * config.rate))
    n_adm = round(2.0 ** (config.n * (config.rate - config.gamma)))
    n_adm = min(max(n_adm, 1), count)
    rng = stream(config.seed_public, CODEBOOK_KEY)
    codewords = rng.normal(0.0, math.sqrt(config.sigma_s2), size=(count, config.n))
    perm = stream(config.seed_secret, CODEBOOK_KEY).permutation(count)
    admissible = np.zeros(count, dtype=bool)
    admissible[perm[:n_adm]] = True
    return GaussCodebook(codewords, admissible, config.sigma_s2,
                         config.seed_public, config.seed_secret)


def _nearest(cb_rows: np.ndarray, sqnorms: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Row index of the nearest codeword for each target row (chunked BLAS)."""
    out = np.empty(targets.shape[0], dtype=np.int64)
    for start in range(0, targets.shape[0], CHUNK):
        block = targets[start:start + CHUNK]
        scores = sqnorms[None, :] - 2.0 * (block @ cb_rows.T)
        out[start:start + CHUNK] = np.argmin(scores, axis=1)
    return out


def gauss_encode(source, cb: GaussCodebook, radius_budget: float | None = None):
    """Nearest admissible codeword; fails when the per-sample squared
    distance exceeds radius_budget (None means unlimited)."""
    source = np.asarray(source, dtype=float)
    if source.size != cb.n:
        raise ValueError(f"source length {source.size} != blocklength {cb.n}")
    adm = cb.admissible_indices
    j = _nearest(cb.codewords[adm], cb._sqnorms[adm], source[None, :])[0]
    idx = int(adm[j])
    x = cb.codewords[idx]
    if radius_budget is not None:
        d2 = float(((x - source) ** 2).mean())
        if d2 > radius_budget:
            return None
    return x, idx


def gauss_decode(y, cb: GaussCodebook, radius: float,
                 check_admissibility: bool = True) -> DecodeOutcome:
    """Nearest codeword overall; not-authentic outside the per-sample
    squared radius or on a forbidden codeword."""
    y = np.asarray(y, dtype=float)
    if y.size != cb.n:
        raise ValueError(f"output length {y.size} != blocklength {cb.n}")
    k = int(_nearest(cb.codewords, cb._sqnorms, y[None, :])[0])
    d2 = float(((cb.codewords[k] - y) ** 2).mean())
    if d2 > radius:
        return DecodeOutcome.not_authentic()
    if check_admissibility and not cb.admissible[k]:
        return DecodeOutcome.not_authentic()
    return DecodeOutcome(cb.codewords[k].copy(), k)


def run_gauss_trials(
    config: GaussSimConfig,
    mode: str = "reference",
    attacker: str = "substitute_codeword",
    attack_param: float | None = None,
    encode_budget: float | None = None,
    codebook: GaussCodebook | None = None,
) -> TrialStats:
    """Reference or attack trials with Gaussian source and noise.

    mode="reference": source -> nearest admissible -> AWGN -> decode.
    mode="attack": the attacker replaces the channel output; success iff
    the decoder outputs a reconstruction different from the encoder's.
    """
    if mode not in ("reference", "attack"):
        raise ValueError("mode must be 'reference' or 'attack'")
    if mode == "attack" and attacker not in GAUSS_ATTACKERS:
        raise ValueError(f"attacker must be one of {GAUSS_ATTACKERS}")
    cb = codebook if codebook is not None else build_gauss_codebook(config)
    n = config.n
    adm = cb.admissible_indices
    cbA, sqA = cb.codewords[adm], cb._sqnorms[adm]
    enc_fail = dec_fail = wrong = matched = succ = att = 0
    de_sum = dr_sum = 0.0
    n_enc = n_rec = 0
    max_gap = 0.0
    sigma_s = math.sqrt(config.sigma_s2)
    sigma_n = math.sqrt(config.sigma_n2)
    for start in range(0, config.trials, CHUNK):
        trials = range(start, min(start + CHUNK, config.trials))
        rngs = [stream(config.seed_public, TRIAL_KEY, t) for t in trials]
        sources = np.stack([r.normal(0.0, sigma_s, size=n) for r in rngs])
        jj = _nearest(cbA, sqA, sources)
        enc_idx = adm[jj]
        x = cb.codewords[enc_idx]
        d2 = ((x - sources) ** 2).mean(axis=1)
        keep = np.ones(len(trials), dtype=bool)
        if encode_budget is not None:
            keep = d2 <= encode_budget
            enc_fail += int((~keep).sum())
        de_sum += float(d2[keep].sum())
        n_enc += int(keep.sum())
        if mode == "reference":
            noise = np.stack([r.normal(0.0, sigma_n, size=n) for r in rngs])
            y = x + noise
        else:
            y = np.empty((len(trials), n))
            for i, t in enumerate(trials):
                arng = stream(config.seed_public, ATTACK_KEY, t)
                if attacker == "substitute_codeword":
                    while True:
                        j = int(arng.integers(0, cb.count))
                        if j != enc_idx[i]:
                            break
                    y[i] = cb.codewords[j]
                elif attacker == "heavy_noise":
                    scale = math.sqrt(attack_param) if attack_param else 2.0 * sigma_n
                    y[i] = x[i] + arng.normal(0.0, scale, size=n)
                else:
                    y[i] = arng.normal(0.0, math.sqrt(config.sigma_s2 + config.sigma_n2), size=n)
        kk = _nearest(cb.codewords, cb._sqnorms, y)
        dy2 = ((cb.codewords[kk] - y) ** 2).mean(axis=1)
        for i in range(len(trials)):
            if not keep[i]:
                continue
            if mode == "attack":
                att += 1
            rejected = dy2[i] > config.decode_radius or not cb.admissible[kk[i]]
            if rejected:
                dec_fail += 1
                continue
            dr = float(((cb.codewords[kk[i]] - sources[i]) ** 2).mean())
            dr_sum += dr
            n_rec += 1
            if kk[i] == enc_idx[i]:
                matched += 1
                max_gap = max(max_gap, abs(dr - d2[i]))
            else:
                wrong += 1
                if mode == "attack":
                    succ += 1
    return TrialStats(
        trials_run=config.trials,
        encode_failures=enc_fail,
        decode_failures=dec_fail,
        wrong_codeword=wrong,
        matched=matched,
        empirical_de=de_sum / n_enc if n_enc else 0.0,
        empirical_dr=dr_sum / n_rec if n_rec else 0.0,
        dr_de_max_gap=max_gap,
        attack_successes=succ,
        attack_trials=att,
    )
