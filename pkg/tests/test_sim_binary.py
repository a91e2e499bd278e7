import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from authdist.core import binary_entropy
from authdist.sim_binary import (
    BinCodebook,
    SimConfig,
    apply_bsc,
    build_codebook,
    decode,
    encode,
    pack_bits,
    run_attack_trials,
    run_reference_trials,
    unpack_bits,
)
from authdist.sim_common import binomial_sigma, stream


def make_config(**kw):
    base = dict(n=16, tau=0.2, gamma=0.25, p=0.08, delta=0.12, trials=100,
                seed_public=11, seed_secret=22)
    base.update(kw)
    return SimConfig(**base)


def handmade_codebook(patterns, admissible, n, tau=0.2):
    words = np.stack([pack_bits(np.array(p, dtype=np.uint8)) for p in patterns])
    return BinCodebook(n, tau, words, np.array(admissible, dtype=bool), 0, 0)


@pytest.mark.parametrize("n", [8, 16, 63, 64, 65, 100])
def test_pack_unpack_roundtrip(n):
    bits = np.random.default_rng(n).integers(0, 2, n).astype(np.uint8)
    assert (unpack_bits(pack_bits(bits), n) == bits).all()


def test_config_validation():
    with pytest.raises(ValueError):
        make_config(n=4)
    with pytest.raises(ValueError):
        make_config(tau=0.5)
    with pytest.raises(ValueError):
        make_config(gamma=0.0)
    with pytest.raises(ValueError):
        make_config(delta=-0.1)
    # tractability cap: n (1 - h(tau) + 2 gamma) must stay <= 24 bits
    with pytest.raises(ValueError):
        make_config(n=64)


def test_codebook_sizes_from_rate_arithmetic():
    cfg = make_config()
    cb = build_codebook(cfg)
    rate = 1.0 - binary_entropy(0.2) + 0.5
    assert cb.count == round(2.0 ** (16 * rate)) == 5592
    assert cb.n_admissible == round(2.0 ** (16 * (rate - 0.25))) == 350
    assert cb.n_admissible / cb.count == pytest.approx(2.0 ** (-16 * 0.25), abs=1e-3)


def test_codebook_reproducible_and_secret_dependent():
    cfg = make_config()
    a, b = build_codebook(cfg), build_codebook(cfg)
    assert (a.words == b.words).all()
    assert (a.admissible == b.admissible).all()
    c = build_codebook(make_config(seed_secret=23))
    assert (a.words == c.words).all()
    assert (a.admissible != c.admissible).any()
    d = build_codebook(make_config(seed_public=12))
    assert (a.words != d.words).any()


def test_half_admissible_when_n_gamma_is_one():
    cfg = make_config(n=16, gamma=1.0 / 16.0)
    cb = build_codebook(cfg)
    assert abs(cb.n_admissible - cb.count / 2.0) <= 1.0


def test_admissibility_marginal_over_fresh_secrets():
    # small codebook: n=8, tau=0.3, gamma=0.3 -> |C| = 54, |A| = 10
    cfg = make_config(n=8, tau=0.3, gamma=0.3)
    cb0 = build_codebook(cfg)
    target = cb0.n_admissible / cb0.count
    hits = 0
    resamples = 10000
    for s in range(resamples):
        cb = build_codebook(make_config(n=8, tau=0.3, gamma=0.3, seed_secret=1000 + s))
        hits += int(cb.admissible[0])
    rate = hits / resamples
    assert abs(rate - target) <= 3.0 * binomial_sigma(target, resamples)


def test_encode_exact_hit_and_threshold():
    n = 16
    zeros = [0] * n
    ones = [1] * n
    cb = handmade_codebook([zeros, ones], [True, True], n, tau=0.2)
    # source equal to an admissible codeword: distortion 0
    x, idx = encode(zeros, cb, delta=0.1)
    assert idx == 0 and (x == 0).all()
    # radius is n(tau+delta) = 4.8: four flips encode, six fail (10 from ones)
    src4 = [1] * 4 + [0] * (n - 4)
    x, idx = encode(src4, cb, delta=0.1)
    assert idx == 0
    src6 = [1] * 6 + [0] * (n - 6)
    assert encode(src6, cb, delta=0.1) is None


def test_encode_skips_forbidden_and_breaks_ties_low():
    n = 16
    zeros = [0] * n
    one_flip = [1] + [0] * (n - 1)
    cb = handmade_codebook([zeros, one_flip], [False, True], n)
    x, idx = encode(zeros, cb, delta=0.1)
    assert idx == 1                      # nearest admissible, not nearest overall
    # tie between two admissible codewords goes to the lowest index
    a = [1, 0] + [0] * (n - 2)
    b = [0, 1] + [0] * (n - 2)
    cb2 = handmade_codebook([a, b], [True, True], n)
    _, idx = encode(zeros, cb2, delta=0.1)
    assert idx == 0


def test_apply_bsc_statistics():
    rng = stream(5, 0)
    x = np.zeros(100000, dtype=np.uint8)
    assert (apply_bsc(x, 0.0, rng) == x).all()
    y = apply_bsc(x, 0.5, stream(5, 1))
    ones = int(y.sum())
    assert abs(ones - 50000) <= 3 * math.sqrt(100000 * 0.25)
    flips = 0
    trials = 10000
    for t in range(trials):
        flips += int(apply_bsc(np.zeros(32, dtype=np.uint8), 0.08, stream(6, t)).sum())
    mean = flips / trials
    sigma = math.sqrt(32 * 0.08 * 0.92 / trials)
    assert abs(mean - 2.56) <= 3 * sigma


def test_decode_noiseless_recovers_codeword():
    # the decoded reconstruction must equal the encoder's codeword whenever
    # decoding succeeds; rare rejections happen when a forbidden duplicate
    # of the codeword sits at a lower index (tie goes to the lowest index)
    cfg = make_config(trials=50)
    cb = build_codebook(cfg)
    encoded = authentic = 0
    for t in range(50):
        rng = stream(cfg.seed_public, 1, t)
        s = rng.integers(0, 2, cfg.n).astype(np.uint8)
        res = encode(s, cb, cfg.delta)
        if res is None:
            continue
        encoded += 1
        x, idx = res
        out = decode(x, cb, cfg.p, cfg.delta)
        if out.authentic:
            authentic += 1
            assert (out.reconstruction == x).all()
    assert encoded > 0 and authentic >= 0.9 * encoded


def test_decode_out_of_radius_and_forbidden():
    n = 16
    zeros = [0] * n
    cb = handmade_codebook([zeros], [True], n)
    far = [1] * 8 + [0] * 8          # distance 8 > n(p+delta) = 3.2
    assert not decode(far, cb, 0.08, 0.12).authentic
    cb_forbidden = handmade_codebook([zeros], [False], n)
    assert not decode(zeros, cb_forbidden, 0.08, 0.12).authentic
    # public decoding ignores the marking
    assert decode(zeros, cb_forbidden, 0.08, 0.12, check_admissibility=False).authentic


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=16, max_size=16))
def test_decode_is_total(bits):
    cb = build_codebook(make_config())
    out = decode(np.array(bits, dtype=np.uint8), cb, 0.08, 0.12)
    assert out.authentic in (True, False)


def test_resubmitted_encoding_is_never_an_attack():
    cfg = make_config(p=0.0, trials=30)
    cb = build_codebook(cfg)
    for t in range(30):
        rng = stream(cfg.seed_public, 1, t)
        s = rng.integers(0, 2, cfg.n).astype(np.uint8)
        res = encode(s, cb, cfg.delta)
        if res is None:
            continue
        x, _ = res
        out = decode(x, cb, cfg.p, cfg.delta)
        if out.authentic:
            assert (out.reconstruction == x).all()


def test_reference_trials_reproducible_and_identity():
    cfg = make_config(n=24, tau=0.2, gamma=0.1, p=0.08, delta=0.12, trials=400)
    stats = run_reference_trials(cfg)
    again = run_reference_trials(cfg)
    assert stats == again
    assert stats.dr_de_max_gap == 0.0
    assert stats.matched > 0
    # p = 0: every produced reconstruction is the encoder's codeword, so the
    # per-trial identity D_r == D_e is exact across the whole run
    clean = run_reference_trials(make_config(p=0.0, trials=200))
    assert clean.wrong_codeword == 0
    assert clean.dr_de_max_gap == 0.0
    assert clean.empirical_dr == pytest.approx(clean.empirical_de, rel=0.05)


def test_attack_trials_substitute_rate():
    cfg = make_config(trials=4000)
    cb = build_codebook(cfg)
    stats = run_attack_trials(cfg, "substitute_codeword", codebook=cb)
    target = cb.n_admissible / cb.count
    sigma = binomial_sigma(target, stats.attack_trials)
    assert abs(stats.attack_rate - target) <= 3 * sigma
    assert stats.attack_trials == cfg.trials - stats.encode_failures


def test_attack_trials_fresh_marking():
    # per-trial markings sample the construction phase: i.i.d. successes at
    # the marginal rate, still reproducible from the seeds
    cfg = make_config(trials=3000)
    stats = run_attack_trials(cfg, "substitute_codeword", fresh_marking=True)
    assert stats == run_attack_trials(cfg, "substitute_codeword", fresh_marking=True)
    target = 2.0 ** (-16 * 0.25)
    assert abs(stats.attack_rate - target) <= 3 * binomial_sigma(target, stats.attack_trials)


def test_attack_trials_random_vector_bounded():
    cfg = make_config(n=32, tau=0.2, gamma=0.1, trials=2000)
    stats = run_attack_trials(cfg, "random_vector")
    bound = 2.0 ** (-32 * 0.1)
    assert stats.attack_rate <= bound + 3 * binomial_sigma(bound, stats.attack_trials)


def test_every_attacker_respects_the_marking_bound():
    cfg = make_config(n=16, tau=0.2, gamma=0.25, trials=3000)
    bound = 2.0 ** (-16 * 0.25)
    for attacker, attack_p in (("substitute_codeword", None),
                               ("heavy_noise", 0.4),
                               ("random_vector", None)):
        stats = run_attack_trials(cfg, attacker, attack_p, fresh_marking=True)
        sigma = binomial_sigma(bound, max(stats.attack_trials, 1))
        assert stats.attack_rate <= bound + 3 * sigma, attacker


def test_heavy_noise_needs_param():
    cfg = make_config()
    with pytest.raises(ValueError):
        run_attack_trials(cfg, "heavy_noise")
    with pytest.raises(ValueError):
        run_attack_trials(cfg, "heavy_noise", attack_p=0.05)   # not heavier than p
    with pytest.raises(ValueError):
        run_attack_trials(cfg, "unknown_attacker")
