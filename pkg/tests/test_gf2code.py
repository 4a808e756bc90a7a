import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_words, gf2_encode, hamming
from qfh.gf2code import (
    LinearCode,
    as_bits,
    bits_to_str,
    encode,
    format_code,
    generate_random_linear_code,
    hash_exponent,
    load_code,
    min_distance_exact,
    min_distance_sampled,
    pair_distance,
    parse_code,
    save_code,
)

# Frozen from the brute-force oracles below (pairwise codeword scan).
CODE42_DMIN = 5
CODE42_WORD_0011 = "1100100010001001"
CODE42_PAIR = ("0110", "1011", 7)
# m=22, s=7, seed=7, 10**5 trials, sampling seed 7
CODE22_SAMPLED_DMIN = 40
CODE22_EXACT_DMIN = 37
CODE22_TRUNC16_DMIN = 41


def brute_min_distance(code):
    words = all_words(code.m)
    cws = [gf2_encode(code.generator, w) for w in words]
    return min(hamming(a, b) for a, b in itertools.combinations(cws, 2))


def test_generation_shape_and_determinism():
    a = generate_random_linear_code(4, 4, 42)
    b = generate_random_linear_code(4, 4, 42)
    assert a.generator.shape == (16, 4)
    assert a.l == 16 and a.s == 4
    assert np.array_equal(a.generator, b.generator)
    assert a == b
    assert not np.array_equal(a.generator, generate_random_linear_code(4, 4, 43).generator)


@pytest.mark.parametrize("m,s", [(0, 3), (3, 0)])
def test_generation_rejects_bad_dimensions(m, s):
    with pytest.raises(ValueError):
        generate_random_linear_code(m, s, 1)


def test_single_column_code_distance_is_column_weight():
    for seed in range(20):
        code = generate_random_linear_code(1, 2, seed)
        weight = int(code.generator.sum())
        assert code.generator.shape == (4, 1)
        assert min_distance_exact(code).d_min == weight


def test_fixture_code_distance_matches_brute_force(code42):
    assert brute_min_distance(code42) == CODE42_DMIN
    metrics = min_distance_exact(code42)
    assert metrics.d_min == CODE42_DMIN
    assert metrics.epsilon == pytest.approx(1 - CODE42_DMIN / 16, abs=0)
    assert metrics.exact


def test_encode_basics(code42):
    assert not encode(code42, "0000").any()
    assert bits_to_str(encode(code42, "0011")) == CODE42_WORD_0011
    assert encode(code42, "0011").tolist() == gf2_encode(code42.generator, "0011")
    with pytest.raises(ValueError):
        encode(code42, "001")


def test_identity_like_generator():
    gen = np.zeros((8, 4), dtype=np.uint8)
    gen[:4] = np.eye(4, dtype=np.uint8)
    code = LinearCode(m=4, l=8, generator=gen)
    assert bits_to_str(encode(code, "1010")).startswith("1010")


def test_repetition_code_metrics(repetition_code):
    code = repetition_code(4)
    metrics = min_distance_exact(code)
    assert (metrics.d_min, metrics.epsilon) == (4, 0.0)
    assert pair_distance(code, "0", "1") == 4
    assert min_distance_sampled(code, 3, seed=5).d_min == 4


def test_zero_column_is_degenerate():
    gen = np.ones((8, 3), dtype=np.uint8)
    gen[:, 1] = 0
    metrics = min_distance_exact(LinearCode(m=3, l=8, generator=gen))
    assert metrics.d_min == 0 and metrics.epsilon == 1.0 and metrics.degenerate


def test_exact_refuses_large_m():
    code = generate_random_linear_code(21, 6, 0)
    with pytest.raises(ValueError, match="min_distance_sampled"):
        min_distance_exact(code)


def test_sampled_exhausting_all_messages_equals_exact(code42):
    sampled = min_distance_sampled(code42, trials=15, seed=0)
    assert sampled.d_min == CODE42_DMIN and not sampled.exact


def test_sampled_never_undershoots():
    code = generate_random_linear_code(10, 5, 3)
    exact = min_distance_exact(code).d_min
    for seed in range(5):
        assert min_distance_sampled(code, 50, seed).d_min >= exact


def _oracle_min_weight(code):
    """Chunked full enumeration with a dense matmul; independent of the packed path."""
    gen = code.generator.astype(np.float32).T
    best = code.l
    for start in range(0, 1 << code.m, 1 << 18):
        vals = np.arange(max(start, 1), min(start + (1 << 18), 1 << code.m), dtype=np.int64)
        msgs = ((vals[:, None] >> np.arange(code.m)) & 1).astype(np.float32)
        # row sums stay far below 2**24, so float32 products are exact
        weights = (np.rint(msgs @ gen).astype(np.int64) & 1).sum(axis=1)
        best = min(best, int(weights.min()))
    return best


def test_sampled_large_code_fixture():
    code = generate_random_linear_code(22, 7, 7)
    sampled = min_distance_sampled(code, 100_000, 7)
    assert sampled.d_min == CODE22_SAMPLED_DMIN
    true_dmin = _oracle_min_weight(code)
    assert true_dmin == CODE22_EXACT_DMIN
    assert sampled.d_min >= true_dmin
    truncated = LinearCode(m=16, l=code.l, generator=code.generator[:, :16], seed=code.seed)
    # a sub-code can only have larger minimum distance than the full code
    assert min_distance_exact(truncated).d_min == CODE22_TRUNC16_DMIN >= true_dmin


def test_pair_distance_fixture(code42):
    w, w2, d = CODE42_PAIR
    oracle = hamming(gf2_encode(code42.generator, w), gf2_encode(code42.generator, w2))
    assert oracle == d
    assert pair_distance(code42, w, w2) == d
    assert pair_distance(code42, w, w) == 0


@settings(max_examples=25, deadline=None)
@given(m=st.integers(1, 6), s=st.integers(1, 5), seed=st.integers(0, 2**64 - 1))
def test_linearity_and_distance_exhaustive(m, s, seed):
    code = generate_random_linear_code(m, s, seed)
    words = all_words(m)
    cws = {w: encode(code, w) for w in words}
    for w, w2 in itertools.product(words, repeat=2):
        x = bits_to_str(as_bits(w) ^ as_bits(w2))
        assert np.array_equal(cws[x], cws[w] ^ cws[w2])
        assert pair_distance(code, w, w2) == int((cws[w] ^ cws[w2]).sum())
    pairwise = min(pair_distance(code, a, b) for a, b in itertools.combinations(words, 2))
    assert min_distance_exact(code).d_min == pairwise


def test_exact_distance_m8_against_pairwise():
    code = generate_random_linear_code(8, 5, 11)
    assert min_distance_exact(code).d_min == brute_min_distance(code)


def test_exact_uses_high_bit_walk_for_m_above_table():
    code = generate_random_linear_code(18, 6, 2)
    assert min_distance_exact(code).d_min == _oracle_min_weight(code)


def test_code_file_round_trip(tmp_path, code42):
    path = tmp_path / "c.txt"
    save_code(code42, path)
    text = path.read_text()
    assert text.splitlines()[0] == "gf2code m=4 l=16 seed=42"
    assert len(text.splitlines()) == 17
    assert load_code(path) == code42
    assert format_code(parse_code(text)) == text


def test_code_file_rejects_bad_rows(code42):
    text = format_code(code42).splitlines()
    with pytest.raises(ValueError):
        parse_code("\n".join(text[:-1]))
    with pytest.raises(ValueError):
        parse_code("\n".join(["gf2 m=4"] + text[1:]))


@pytest.mark.parametrize("m,c,s", [(4, 4, 4), (1, 4, 2), (8, 4, 5), (16, 4, 6), (3, 4, 4)])
def test_hash_exponent(m, c, s):
    assert hash_exponent(m, c) == s
