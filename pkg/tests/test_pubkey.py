import math

import numpy as np
import pytest

from authdist.pubkey import (
    TestDoubleScheme,
    binomial_majority_error,
    carrier_channel_robustness,
    index_bits,
    pk_decode,
    pk_encode,
    repetition_for_recovery,
    _embed_quantized,
    _extract_quantized,
)
from authdist.sim_binary import SimConfig, build_codebook, decode, encode
from authdist.sim_common import stream
from authdist.sim_gaussian import GaussSimConfig, build_gauss_codebook

KS = KP = b"matched-test-key"


def bin_config(**kw):
    base = dict(n=16, tau=0.2, gamma=0.25, p=0.0, delta=0.12, trials=200,
                seed_public=11, seed_secret=22)
    base.update(kw)
    return SimConfig(**base)


@pytest.fixture(scope="module")
def bin_cb():
    return build_codebook(bin_config())


@pytest.fixture(scope="module")
def scheme():
    return TestDoubleScheme(64)


def test_scheme_sign_verify_contract(scheme):
    msg = np.array([1, 0, 1, 1, 0, 0, 1], dtype=np.uint8)
    tag = scheme.sign(msg, KS)
    assert tag.size == 64 and set(np.unique(tag)) <= {0, 1}
    assert (tag == scheme.sign(msg, KS)).all()
    assert scheme.verify(msg, tag, KP)
    assert not scheme.verify(msg, tag, b"other-key")
    assert not scheme.verify(msg, 1 - tag, KP)
    other = scheme.sign(np.array([1, 0, 1, 1, 0, 0, 0], dtype=np.uint8), KS)
    assert (other != tag).any()


def test_index_bits_width_and_value():
    bits = index_bits(5, 5592)
    assert bits.size == 13                       # ceil(log2 5592)
    assert int("".join(map(str, bits)), 2) == 5
    assert index_bits(0, 2).size == 1


def test_embedding_overhead_and_exact_extraction(bin_cb, scheme):
    rng = stream(1, 0)
    s = rng.integers(0, 2, 16).astype(np.uint8)
    pe = pk_encode(s, bin_cb, scheme, KS, delta=0.12)
    assert pe is not None
    assert pe.embedding_overhead == pytest.approx(64 / (16 + 64))
    out = pk_decode(pe.block, bin_cb, scheme, KP, p=0.0, delta=0.12)
    assert out.authentic and out.codeword_index == pe.codeword_index


def test_pk_equals_secret_key_on_clean_channel(bin_cb, scheme):
    cfg = bin_config()
    for t in range(300):
        rng = stream(cfg.seed_public, 1, t)
        s = rng.integers(0, 2, cfg.n).astype(np.uint8)
        pe = pk_encode(s, bin_cb, scheme, KS, delta=cfg.delta)
        if pe is None:
            continue
        pk_out = pk_decode(pe.block, bin_cb, scheme, KP, p=cfg.p, delta=cfg.delta)
        sk_out = decode(pe.content, bin_cb, cfg.p, cfg.delta)
        assert pk_out.authentic == sk_out.authentic
        if pk_out.authentic:
            assert (pk_out.reconstruction == sk_out.reconstruction).all()


def test_tag_reuse_substitution_rejected(bin_cb, scheme):
    cfg = bin_config()
    rejected = attacks = 0
    for t in range(500):
        rng = stream(cfg.seed_public, 1, t)
        s = rng.integers(0, 2, cfg.n).astype(np.uint8)
        pe = pk_encode(s, bin_cb, scheme, KS, delta=cfg.delta)
        if pe is None:
            continue
        arng = stream(cfg.seed_public, 2, t)
        while True:
            j = int(arng.integers(0, bin_cb.count))
            if not (bin_cb.codeword_bits(j) == pe.content).all():
                break
        forged = np.concatenate([bin_cb.codeword_bits(j), pe.carrier])
        attacks += 1
        rejected += int(not pk_decode(forged, bin_cb, scheme, KP,
                                      p=cfg.p, delta=cfg.delta).authentic)
    assert attacks > 0 and rejected == attacks


def test_random_tag_forgery_rejected(bin_cb, scheme):
    cfg = bin_config()
    arng = stream(99, 0)
    accepted = 0
    for _ in range(10000):
        j = int(arng.integers(0, bin_cb.count))
        tag = arng.integers(0, 2, 64).astype(np.uint8)
        block = np.concatenate([bin_cb.codeword_bits(j), tag])
        accepted += int(pk_decode(block, bin_cb, scheme, KP,
                                  p=cfg.p, delta=cfg.delta).authentic)
    assert accepted == 0


def test_forgery_rate_independent_of_marking(bin_cb, scheme):
    # with the marking published, only the tag gates acceptance: submitting a
    # FORBIDDEN codeword with a valid tag for its index must be accepted
    forb = int(np.flatnonzero(~bin_cb.admissible)[0])
    tag = scheme.sign(index_bits(forb, bin_cb.count), KS)
    block = np.concatenate([bin_cb.codeword_bits(forb), tag])
    out = pk_decode(block, bin_cb, scheme, KP, p=0.0, delta=0.12)
    assert out.authentic and out.codeword_index == forb


def test_conditional_equivalence_under_noise(bin_cb, scheme):
    # noisy content, clean carrier: whenever the tag survives, the pk decoder
    # agrees with the public content decode and accepts iff that decode
    # recovers the signed index
    cfg = bin_config(p=0.08)
    for t in range(200):
        rng = stream(cfg.seed_public, 1, t)
        s = rng.integers(0, 2, cfg.n).astype(np.uint8)
        pe = pk_encode(s, bin_cb, scheme, KS, delta=cfg.delta)
        if pe is None:
            continue
        noisy_content = pe.content ^ (rng.random(cfg.n) < cfg.p).astype(np.uint8)
        block = np.concatenate([noisy_content, pe.carrier])
        pk_out = pk_decode(block, bin_cb, scheme, KP, p=cfg.p, delta=cfg.delta)
        public = decode(noisy_content, bin_cb, cfg.p, cfg.delta, check_admissibility=False)
        should_accept = public.authentic and public.codeword_index == pe.codeword_index
        assert pk_out.authentic == should_accept
        if pk_out.authentic:
            assert (pk_out.reconstruction == public.reconstruction).all()


def test_binomial_majority_error_against_direct_sum():
    # independent oracle: direct summation of the binomial tail
    direct = sum(math.comb(9, j) * 0.08 ** j * 0.92 ** (9 - j) for j in range(5, 10))
    assert direct == pytest.approx(3.1358185373696e-04, rel=1e-10)
    assert binomial_majority_error(9, 0.08) == pytest.approx(direct, rel=1e-12)


def test_repetition_for_recovery_meets_target():
    k = repetition_for_recovery(0.08, 64, target=0.99)
    assert k % 2 == 1
    assert (1 - binomial_majority_error(k, 0.08)) ** 64 >= 0.99
    assert (1 - binomial_majority_error(k - 2, 0.08)) ** 64 < 0.99
    assert repetition_for_recovery(0.0, 64) == 1


def test_carrier_robustness_clean_channel(bin_cb, scheme):
    cfg = bin_config(p=0.0, trials=200)
    stats = carrier_channel_robustness(cfg, scheme, repetition=1, codebook=bin_cb)
    assert stats.tag_recoveries == cfg.trials


def test_carrier_robustness_needs_redundancy(bin_cb, scheme):
    cfg = bin_config(p=0.08, trials=2000)
    rep9 = carrier_channel_robustness(cfg, scheme, repetition=9, codebook=bin_cb)
    rep1 = carrier_channel_robustness(cfg, scheme, repetition=1, codebook=bin_cb)
    # predictions: (1 - 3.14e-4)^64 = 0.9801 vs 0.92^64 = 0.0048
    assert rep9.tag_recoveries / cfg.trials >= 0.96
    assert rep1.tag_recoveries / cfg.trials <= 0.05


def test_quantized_carrier_roundtrip_and_noise():
    tag = stream(3, 0).integers(0, 2, 64).astype(np.uint8)
    carrier = _embed_quantized(tag, 3, 6.0)
    assert (_extract_quantized(carrier, 64, 3, 6.0) == tag).all()
    noise = stream(3, 1).normal(0.0, 1.0, carrier.size)
    assert (_extract_quantized(carrier + noise, 64, 3, 6.0) == tag).all()


def test_gaussian_pk_roundtrip():
    cfg = GaussSimConfig(n=8, rate=1.5, sigma_s2=100.0, sigma_n2=1.0, trials=10,
                         seed_public=5, seed_secret=6)
    cb = build_gauss_codebook(cfg)
    scheme = TestDoubleScheme(64)
    for t in range(20):
        s = stream(7, t).normal(0, 10.0, 8)
        pe = pk_encode(s, cb, scheme, KS, quant_step=6.0, repetition=3)
        out = pk_decode(pe.block, cb, scheme, KP, radius=cfg.decode_radius,
                        quant_step=6.0, repetition=3)
        assert out.authentic and out.codeword_index == pe.codeword_index
        # substitution with the old tag must fail
        arng = stream(8, t)
        j = int(arng.integers(0, cb.count))
        if j != pe.codeword_index:
            forged = np.concatenate([cb.codewords[j], pe.carrier])
            assert not pk_decode(forged, cb, scheme, KP, radius=cfg.decode_radius,
                                 quant_step=6.0, repetition=3).authentic


def test_gaussian_carrier_robustness():
    cfg = GaussSimConfig(n=8, rate=1.5, sigma_s2=100.0, sigma_n2=1.0, trials=400,
                         seed_public=5, seed_secret=6)
    stats = carrier_channel_robustness(cfg, TestDoubleScheme(64), repetition=3)
    assert stats.tag_recoveries / cfg.trials >= 0.99
