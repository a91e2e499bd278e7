"""Monte Carlo of the secret-key random-codebook scheme, binary-Hamming case.

The simulated scheme is the corner of the parametric family with every
source symbol coded (encoding and reconstruction distortions coincide):
codewords are i.i.d. uniform bit strings, a secret uniformly random subset
is marked admissible, the encoder quantizes the source to the nearest
admissible codeword, the channel is a BSC, and the decoder maps to the
nearest codeword in the full public codebook, rejecting when it is
forbidden or too far.  Joint typicality is realized as Hamming-distance
thresholds n(tau + delta) on the encoder side and n(p + delta) on the
decoder side.

Codewords are stored packed, 64 bits per word, so distances are XOR +
popcount over the whole codebook at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import binary_entropy
from .sim_common import (
    ATTACK_KEY,
    CODEBOOK_KEY,
    TRIAL_KEY,
    DecodeOutcome,
    TrialStats,
    stream,
)

LOG2_CODEBOOK_CAP = 24.0

ATTACKERS = ("substitute_codeword", "heavy_noise", "random_vector")


@dataclass(frozen=True)
class SimConfig:
    n: int
    tau: float
    gamma: float
    p: float
    delta: float
    trials: int
    seed_public: int
    seed_secret: int

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("blocklength must be >= 8")
        if not (0.0 < self.tau < 0.5):
            raise ValueError("tau must be in (0, 1/2)")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if not (0.0 <= self.p <= 0.5):
            raise ValueError("p must be in [0, 1/2]")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.log2_codebook_size > LOG2_CODEBOOK_CAP:
            raise ValueError(
                f"codebook of 2^{self.log2_codebook_size:.2f} codewords exceeds "
                f"the 2^{LOG2_CODEBOOK_CAP:.0f} tractability cap"
            )

    @property
    def rate(self) -> float:
        """Codebook rate: source-description rate plus twice the penalty."""
        return 1.0 - binary_entropy(self.tau) + 2.0 * self.gamma

    @property
    def log2_codebook_size(self) -> float:
        return self.n * self.rate


def _n_words(n: int) -> int:
    return (n + 63) // 64


def _random_words(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """(count, W) packed matrix of i.i.d. uniform bits."""
    w = _n_words(n)
    lo = rng.integers(0, 1 << 32, size=(count, w), dtype=np.uint64)
    hi = rng.integers(0, 1 << 32, size=(count, w), dtype=np.uint64)
    words = (hi << np.uint64(32)) | lo
    rem = n % 64
    if rem:
        words[:, -1] &= np.uint64((1 << rem) - 1)
    return words


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """(n,) bits -> (W,) uint64 words, LSB-first within each word."""
    bits = np.asarray(bits, dtype=np.uint64)
    n = bits.size
    out = np.zeros(_n_words(n), dtype=np.uint64)
    idx = np.arange(n)
    np.bitwise_or.at(out, idx // 64, bits << (idx % 64).astype(np.uint64))
    return out


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """(W,) uint64 words -> (n,) uint8 bits."""
    idx = np.arange(n)
    return ((words[idx // 64] >> (idx % 64).astype(np.uint64)) & np.uint64(1)).astype(np.uint8)


def _distances(words: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Hamming distances of every packed row to the packed target."""
    return np.bitwise_count(words ^ target[None, :]).sum(axis=1)


@dataclass(frozen=True)
class BinCodebook:
    """Indexed random codebook with a keyed admissible subset."""

    n: int
    tau: float
    words: np.ndarray          # (count, W) packed codewords
    admissible: np.ndarray     # (count,) bool
    seed_public: int
    seed_secret: int

    def __post_init__(self):
        self.words.setflags(write=False)
        self.admissible.setflags(write=False)

    @property
    def count(self) -> int:
        return self.words.shape[0]

    @property
    def n_admissible(self) -> int:
        return int(self.admissible.sum())

    @cached_property
    def admissible_indices(self) -> np.ndarray:
        return np.flatnonzero(self.admissible)

    def codeword_bits(self, index: int) -> np.ndarray:
        return unpack_bits(self.words[index], self.n)


def build_codebook(config: SimConfig) -> BinCodebook:
    """Draw the public codebook and mark the secret admissible subset.

    |C| = round(2^(n R)) i.i.d. uniform codewords from seed_public;
    |A| = round(2^(n (R - gamma))) indices chosen as the head of a keyed
    pseudorandom permutation derived from seed_secret, which is a uniformly
    random subset of the index set.
    """
    count = round(2.0 ** config.log2_codebook_size)
    n_adm = round(2.0 ** (config.n * (config.rate - config.gamma)))
    n_adm = min(max(n_adm, 1), count)
    words = _random_words(stream(config.seed_public, CODEBOOK_KEY), count, config.n)
    perm = stream(config.seed_secret, CODEBOOK_KEY).permutation(count)
    admissible = np.zeros(count, dtype=bool)
    admissible[perm[:n_adm]] = True
    return BinCodebook(config.n, config.tau, words, admissible,
                       config.seed_public, config.seed_secret)


def _encode_word(source: np.ndarray, cb: BinCodebook, delta: float) -> int | None:
    adm = cb.admissible_indices
    d = _distances(cb.words[adm], source)
    j = int(np.argmin(d))
    if d[j] > cb.n * (cb.tau + delta) + 1e-12:
        return None
    return int(adm[j])


def _decode_word(y: np.ndarray, cb: BinCodebook, p: float, delta: float,
                 check_admissibility: bool = True) -> int | None:
    d = _distances(cb.words, y)
    k = int(np.argmin(d))
    if d[k] > cb.n * (p + delta) + 1e-12:
        return None
    if check_admissibility and not cb.admissible[k]:
        return None
    return k


def encode(source, cb: BinCodebook, delta: float):
    """Quantize to the nearest admissible codeword within radius n(tau+delta).

    Returns ``(x_bits, codeword_index)`` with x equal to the chosen
    codeword, or None when no admissible codeword lies within the radius
    (counted as an encoding failure by the trial drivers).  Ties go to the
    lowest index.
    """
    source = np.asarray(source, dtype=np.uint8)
    if source.size != cb.n:
        raise ValueError(f"source length {source.size} != blocklength {cb.n}")
    idx = _encode_word(pack_bits(source), cb, delta)
    if idx is None:
        return None
    return cb.codeword_bits(idx), idx


def apply_bsc(x, p: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability p using the given stream."""
    x = np.asarray(x, dtype=np.uint8)
    flips = (rng.random(x.size) < p).astype(np.uint8)
    return x ^ flips


def decode(y, cb: BinCodebook, p: float, delta: float,
           check_admissibility: bool = True) -> DecodeOutcome:
    """Nearest-codeword decoding over the full public codebook.

    Not-authentic when nothing lies within radius n(p+delta) or when the
    nearest codeword (lowest index on ties) is forbidden.  Total: every
    input yields an outcome, never an exception.
    """
    y = np.asarray(y, dtype=np.uint8)
    if y.size != cb.n:
        raise ValueError(f"channel output length {y.size} != blocklength {cb.n}")
    k = _decode_word(pack_bits(y), cb, p, delta, check_admissibility)
    if k is None:
        return DecodeOutcome.not_authentic()
    return DecodeOutcome(cb.codeword_bits(k), k)


def _flip_mask(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    return pack_bits((rng.random(n) < p).astype(np.uint8))


def run_reference_trials(config: SimConfig, codebook: BinCodebook | None = None) -> TrialStats:
    """source -> encode -> BSC(p) -> decode, tallied over config.trials."""
    cb = codebook if codebook is not None else build_codebook(config)
    n = config.n
    enc_fail = dec_fail = wrong = matched = 0
    de_sum = dr_sum = 0.0
    n_rec = 0
    max_gap = 0.0
    for t in range(config.trials):
        rng = stream(config.seed_public, TRIAL_KEY, t)
        s = _random_words(rng, 1, n)[0]
        idx = _encode_word(s, cb, config.delta)
        if idx is None:
            enc_fail += 1
            continue
        x = cb.words[idx]
        de = int(np.bitwise_count(x ^ s).sum()) / n
        de_sum += de
        y = x ^ _flip_mask(rng, n, config.p)
        k = _decode_word(y, cb, config.p, config.delta)
        if k is None:
            dec_fail += 1
            continue
        dr = int(np.bitwise_count(cb.words[k] ^ s).sum()) / n
        dr_sum += dr
        n_rec += 1
        if (cb.words[k] == x).all():
            matched += 1
            max_gap = max(max_gap, abs(dr - de))
        else:
            wrong += 1
    encoded = config.trials - enc_fail
    return TrialStats(
        trials_run=config.trials,
        encode_failures=enc_fail,
        decode_failures=dec_fail,
        wrong_codeword=wrong,
        matched=matched,
        empirical_de=de_sum / encoded if encoded else 0.0,
        empirical_dr=dr_sum / n_rec if n_rec else 0.0,
        dr_de_max_gap=max_gap,
        attack_successes=0,
        attack_trials=0,
    )


def run_attack_trials(
    config: SimConfig,
    attacker: str = "substitute_codeword",
    attack_p: float | None = None,
    codebook: BinCodebook | None = None,
    fresh_marking: bool = False,
) -> TrialStats:
    """Attack trials: the attacker sees everything except the secret marking.

    A trial is a successful attack iff the decoder outputs a reconstruction
    different from the encoder's codeword.  Trials whose encoding fails are
    skipped (there is no authentic reconstruction to attack).

    With ``fresh_marking`` every trial draws its own admissible subset from
    a per-trial substream of seed_secret, sampling the construction phase
    the 2^(-n gamma) security statement averages over; successes are then
    i.i.d. across trials.  Otherwise one fixed marking is attacked
    throughout, and the empirical rate concentrates on that realization.
    """
    if attacker not in ATTACKERS:
        raise ValueError(f"attacker must be one of {ATTACKERS}")
    if attacker == "heavy_noise":
        if attack_p is None or not (config.p < attack_p <= 0.5):
            raise ValueError("heavy_noise needs attack_p in (p, 1/2]")
    cb = codebook if codebook is not None else build_codebook(config)
    n = config.n
    enc_fail = dec_fail = wrong = matched = succ = att = 0
    de_sum = 0.0
    for t in range(config.trials):
        if fresh_marking:
            perm = stream(config.seed_secret, CODEBOOK_KEY, t).permutation(cb.count)
            admissible = np.zeros(cb.count, dtype=bool)
            admissible[perm[: cb.n_admissible]] = True
            cb_t = BinCodebook(cb.n, cb.tau, cb.words, admissible,
                               cb.seed_public, cb.seed_secret)
        else:
            cb_t = cb
        rng = stream(config.seed_public, TRIAL_KEY, t)
        s = _random_words(rng, 1, n)[0]
        idx = _encode_word(s, cb_t, config.delta)
        if idx is None:
            enc_fail += 1
            continue
        x = cb_t.words[idx]
        de_sum += int(np.bitwise_count(x ^ s).sum()) / n
        arng = stream(config.seed_public, ATTACK_KEY, t)
        if attacker == "substitute_codeword":
            while True:
                j = int(arng.integers(0, cb.count))
                if not (cb.words[j] == x).all():
                    break
            y = cb.words[j]
        elif attacker == "heavy_noise":
            y = x ^ _flip_mask(arng, n, attack_p)
        else:
            y = _random_words(arng, 1, n)[0]
        att += 1
        k = _decode_word(y, cb_t, config.p, config.delta)
        if k is None:
            dec_fail += 1
        elif (cb_t.words[k] == x).all():
            matched += 1
        else:
            wrong += 1
            succ += 1
    encoded = config.trials - enc_fail
    return TrialStats(
        trials_run=config.trials,
        encode_failures=enc_fail,
        decode_failures=dec_fail,
        wrong_codeword=wrong,
        matched=matched,
        empirical_de=de_sum / encoded if encoded else 0.0,
        empirical_dr=0.0,
        dr_de_max_gap=0.0,
        attack_successes=succ,
        attack_trials=att,
    )
