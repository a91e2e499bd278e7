"""Public-key adaptation: sign the reconstruction's index, embed the tag.

The secret admissibility marking is published (decoding ignores it) and
authenticity instead rests on a digital signature: the encoder signs the
bitwise representation of the authentic reconstruction (the codeword index
in fixed-width binary) and embeds the tag on a reserved carrier appended
to the content block.  The index is a deterministic function of the source
only once the codebook is fixed, so signing happens against the published
codebook realization.  The decoder re-derives the index by public nearest-
codeword decoding, extracts the tag estimate, and accepts only if the
signature verifies.  Forging therefore requires forging a tag for a new
index, whatever the admissible fraction was.

Carrier: the tag is repetition-coded, k carrier samples per tag bit.  For
binary content the carrier samples are the repeated tag bits themselves
(majority decode); for Gaussian content each bit is embedded by scalar
quantization with step ``quant_step`` (bit b maps to lattice point b *
quant_step; extraction rounds to the nearest lattice point and takes its
parity).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .sim_binary import BinCodebook, SimConfig, apply_bsc, build_codebook, decode, encode
from .sim_common import DecodeOutcome, TrialStats, stream
from .sim_gaussian import GaussCodebook, GaussSimConfig, build_gauss_codebook, gauss_decode, gauss_encode


class TestDoubleScheme:
    """Keyed deterministic tag standing in for a real signature scheme.

    sign = keyed BLAKE2b truncated to tag_bits; verify = recompute and
    compare.  Signing and public key coincide (symmetric stand-in); any
    asymmetric scheme with the same sign/verify surface plugs in instead.
    """

    __test__ = False    # not a pytest class, despite the name

    def __init__(self, tag_bits: int = 64):
        if tag_bits < 8 or tag_bits > 512:
            raise ValueError("tag_bits must be in [8, 512]")
        self.tag_bits = tag_bits

    def sign(self, message_bits, signing_key: bytes) -> np.ndarray:
        msg = np.asarray(message_bits, dtype=np.uint8)
        digest_size = (self.tag_bits + 7) // 8
        h = hashlib.blake2b(np.packbits(msg).tobytes() + bytes([msg.size % 256]),
                            key=signing_key[:64], digest_size=digest_size)
        bits = np.unpackbits(np.frombuffer(h.digest(), dtype=np.uint8))
        return bits[: self.tag_bits].copy()

    def verify(self, message_bits, tag_bits, public_key: bytes) -> bool:
        tag = np.asarray(tag_bits, dtype=np.uint8)
        if tag.size != self.tag_bits:
            return False
        return bool((self.sign(message_bits, public_key) == tag).all())


def index_bits(index: int, count: int) -> np.ndarray:
    """Fixed-width binary representation of a codeword index, MSB first."""
    width = max((count - 1).bit_length(), 1)
    return np.array([(index >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


@dataclass(frozen=True)
class PublicEncoding:
    """Content block plus the tag carrier appended to it."""

    content: np.ndarray
    tag: np.ndarray
    carrier: np.ndarray
    codeword_index: int
    repetition: int
    quant_step: float | None

    @property
    def block(self) -> np.ndarray:
        return np.concatenate([self.content, self.carrier])

    @property
    def embedding_overhead(self) -> float:
        """Carrier fraction of the transmitted block."""
        return self.carrier.size / (self.content.size + self.carrier.size)


def _embed_binary(tag: np.ndarray, repetition: int) -> np.ndarray:
    return np.repeat(tag, repetition).astype(np.uint8)


def _extract_binary(carrier: np.ndarray, tag_bits: int, repetition: int) -> np.ndarray:
    votes = carrier[: tag_bits * repetition].reshape(tag_bits, repetition)
    return (votes.sum(axis=1) * 2 > repetition).astype(np.uint8)


def _embed_quantized(tag: np.ndarray, repetition: int, step: float) -> np.ndarray:
    return np.repeat(tag.astype(float), repetition) * step


def _extract_quantized(carrier: np.ndarray, tag_bits: int, repetition: int, step: float) -> np.ndarray:
    lattice = np.rint(carrier[: tag_bits * repetition] / step).astype(np.int64)
    bits = (lattice & 1).astype(np.uint8)
    votes = bits.reshape(tag_bits, repetition)
    return (votes.sum(axis=1) * 2 > repetition).astype(np.uint8)


def pk_encode(
    source,
    codebook,
    scheme,
    signing_key: bytes,
    *,
    delta: float | None = None,
    radius_budget: float | None = None,
    repetition: int = 1,
    quant_step: float | None = None,
):
    """Encode, sign the codeword index, append the embedded tag.

    Binary codebooks need ``delta`` (the encoder radius slack); Gaussian
    codebooks take an optional ``radius_budget`` and need ``quant_step``.
    Returns a :class:`PublicEncoding` or None when the underlying encoder
    fails.
    """
    if repetition < 1:
        raise ValueError("repetition must be >= 1")
    if isinstance(codebook, BinCodebook):
        if delta is None:
            raise ValueError("binary pk_encode needs delta")
        result = encode(source, codebook, delta)
        if result is None:
            return None
        x, idx = result
        tag = scheme.sign(index_bits(idx, codebook.count), signing_key)
        carrier = _embed_binary(tag, repetition)
        return PublicEncoding(x, tag, carrier, idx, repetition, None)
    if isinstance(codebook, GaussCodebook):
        if quant_step is None or quant_step <= 0:
            raise ValueError("gaussian pk_encode needs a positive quant_step")
        result = gauss_encode(source, codebook, radius_budget)
        if result is None:
            return None
        x, idx = result
        tag = scheme.sign(index_bits(idx, codebook.count), signing_key)
        carrier = _embed_quantized(tag, repetition, quant_step)
        return PublicEncoding(x, tag, carrier, idx, repetition, quant_step)
    raise TypeError(f"unsupported codebook type {type(codebook).__name__}")


def pk_decode(
    y_block,
    codebook,
    scheme,
    public_key: bytes,
    *,
    p: float | None = None,
    delta: float | None = None,
    radius: float | None = None,
    repetition: int = 1,
    quant_step: float | None = None,
) -> DecodeOutcome:
    """Extract the tag, decode publicly (marking ignored), verify, accept.

    The admissibility predicate plays no role: anyone holding the public
    key can decode.  Rejection happens only on decode failure or signature
    mismatch.
    """
    tag_len = scheme.tag_bits * repetition
    y_block = np.asarray(y_block)
    if y_block.size != codebook.n + tag_len:
        raise ValueError(f"block length {y_block.size} != content {codebook.n} + carrier {tag_len}")
    content, carrier = y_block[: codebook.n], y_block[codebook.n:]
    if isinstance(codebook, BinCodebook):
        if p is None or delta is None:
            raise ValueError("binary pk_decode needs p and delta")
        tag_hat = _extract_binary(np.asarray(carrier, dtype=np.uint8), scheme.tag_bits, repetition)
        inner = decode(content, codebook, p, delta, check_admissibility=False)
    elif isinstance(codebook, GaussCodebook):
        if radius is None or quant_step is None:
            raise ValueError("gaussian pk_decode needs radius and quant_step")
        tag_hat = _extract_quantized(np.asarray(carrier, dtype=float),
                                     scheme.tag_bits, repetition, quant_step)
        inner = gauss_decode(content, codebook, radius, check_admissibility=False)
    else:
        raise TypeError(f"unsupported codebook type {type(codebook).__name__}")
    if not inner.authentic:
        return DecodeOutcome.not_authentic()
    msg = index_bits(inner.codeword_index, codebook.count)
    if not scheme.verify(msg, tag_hat, public_key):
        return DecodeOutcome.not_authentic()
    return inner


def binomial_majority_error(repetition: int, p: float) -> float:
    """P[majority of `repetition` BSC(p) copies is wrong] (ties count as wrong)."""
    k = repetition
    thresh = k // 2 + 1 if k % 2 else k // 2
    return sum(math.comb(k, j) * p ** j * (1 - p) ** (k - j) for j in range(thresh, k + 1))


def repetition_for_recovery(p: float, tag_bits: int, target: float = 0.99) -> int:
    """Smallest odd repetition factor with predicted tag recovery >= target."""
    if p <= 0:
        return 1
    for k in range(1, 199, 2):
        per_bit = binomial_majority_error(k, p)
        if (1.0 - per_bit) ** tag_bits >= target:
            return k
    raise ValueError(f"no repetition factor below 199 reaches {target} at p={p}")


def carrier_channel_robustness(
    config,
    scheme: TestDoubleScheme | None = None,
    repetition: int | None = None,
    codebook=None,
) -> TrialStats:
    """Tag-recovery rate when the reference channel also hits the carrier.

    Accepts a binary :class:`SimConfig` (BSC on the carrier bits) or a
    Gaussian :class:`GaussSimConfig` (AWGN on the quantized carrier).  The
    repetition factor defaults to the smallest one whose predicted recovery
    is >= 99% at the configured channel.
    """
    scheme = scheme or TestDoubleScheme()
    key = b"carrier-robustness"
    recovered = 0
    if isinstance(config, SimConfig):
        rep = repetition if repetition is not None else repetition_for_recovery(config.p, scheme.tag_bits)
        cb = codebook if codebook is not None else build_codebook(config)
        for t in range(config.trials):
            rng = stream(config.seed_public, 3, t)
            idx = int(rng.integers(0, cb.count))
            tag = scheme.sign(index_bits(idx, cb.count), key)
            carrier = _embed_binary(tag, rep)
            noisy = apply_bsc(carrier, config.p, rng)
            tag_hat = _extract_binary(noisy, scheme.tag_bits, rep)
            recovered += int((tag_hat == tag).all())
    elif isinstance(config, GaussSimConfig):
        quant_step = 6.0 * math.sqrt(config.sigma_n2)
        rep = repetition if repetition is not None else 3
        cb = codebook if codebook is not None else build_gauss_codebook(config)
        for t in range(config.trials):
            rng = stream(config.seed_public, 3, t)
            idx = int(rng.integers(0, cb.count))
            tag = scheme.sign(index_bits(idx, cb.count), key)
            carrier = _embed_quantized(tag, rep, quant_step)
            noisy = carrier + rng.normal(0.0, math.sqrt(config.sigma_n2), size=carrier.size)
            tag_hat = _extract_quantized(noisy, scheme.tag_bits, rep, quant_step)
            recovered += int((tag_hat == tag).all())
    else:
        raise TypeError(f"unsupported config type {type(config).__name__}")
    return TrialStats(
        trials_run=config.trials,
        encode_failures=0,
        decode_failures=config.trials - recovered,
        wrong_codeword=0,
        matched=recovered,
        empirical_de=0.0,
        empirical_dr=0.0,
        dr_de_max_gap=0.0,
        attack_successes=0,
        attack_trials=0,
        tag_recoveries=recovered,
    )
