import heapq
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semcom.codec import (
    BitStream,
    FrequencyModel,
    build_codebook,
    correct_decode,
    decode,
    encode,
    expected_bits_per_symbol,
)
from semcom.errors import (
    DanglingBits,
    EmptyVocabulary,
    LengthNotMultiple,
    SymbolNotInCodebook,
    UnknownCodeword,
)
from semcom.library import SymbolSequence


def oracle_huffman_expected_length(weights):
    """Classic tree-merge Huffman; returns E[len] in bits/symbol."""
    if len(weights) == 1:
        return 1.0
    heap = [(w, [i]) for i, w in enumerate(weights)]
    heapq.heapify(heap)
    lengths = [0] * len(weights)
    while len(heap) > 1:
        w1, a = heapq.heappop(heap)
        w2, b = heapq.heappop(heap)
        for i in a + b:
            lengths[i] += 1
        heapq.heappush(heap, (w1 + w2, a + b))
    total = sum(weights)
    return sum(w * l for w, l in zip(weights, lengths)) / total


def oracle_greedy_scan(width, min_distance):
    """All width-bit words accepted greedily under the distance rule."""
    accepted = []
    for word in range(1 << width):
        if all(bin(word ^ a).count("1") >= min_distance for a in accepted):
            accepted.append(word)
    return [format(w, f"0{width}b") for w in accepted]


def entropy(probs):
    return -sum(p * math.log2(p) for p in probs if p > 0)


def seq(*symbols):
    return SymbolSequence(tuple(symbols), level=None)


def test_fixed_nine_symbols_four_bits():
    cb = build_codebook(range(9), FrequencyModel.uniform(), "fixed")
    assert all(len(c) == 4 for c in cb.codes.values())
    assert cb.code_length == 4


def test_fixed_codes_are_binary_ranks():
    cb = build_codebook((10, 20, 30), FrequencyModel.uniform(), "fixed")
    assert cb.codes == {10: "00", 20: "01", 30: "10"}


def test_prefix_nine_uniform_expected_length():
    cb = build_codebook(range(9), FrequencyModel.uniform(), "prefix")
    got = expected_bits_per_symbol(cb, FrequencyModel.uniform())
    assert got == pytest.approx(29 / 9, abs=1e-9)
    assert got == pytest.approx(oracle_huffman_expected_length([1] * 9), abs=1e-9)


def test_robust_two_symbols_distance_three():
    cb = build_codebook((0, 1), FrequencyModel.uniform(), "robust", min_distance=3)
    assert cb.code_length == 3
    assert cb.codes == {0: "000", 1: "111"}
    # the scan at width 2 cannot fit two words, at width 3 it can
    assert len(oracle_greedy_scan(2, 3)) < 2
    assert oracle_greedy_scan(3, 3)[:2] == ["000", "111"]


def test_robust_codes_match_greedy_oracle():
    for size in (2, 5, 9, 16):
        cb = build_codebook(range(size), FrequencyModel.uniform(), "robust", min_distance=3)
        width = cb.code_length
        oracle = oracle_greedy_scan(width, 3)
        assert len(oracle) >= size
        assert [cb.codes[s] for s in cb.vocabulary] == oracle[:size]
        # minimality: one bit fewer cannot host the vocabulary
        assert len(oracle_greedy_scan(width - 1, 3)) < size


def test_empty_vocabulary_rejected():
    with pytest.raises(EmptyVocabulary):
        build_codebook((), FrequencyModel.uniform(), "fixed")


def test_unsorted_vocabulary_rejected():
    with pytest.raises(ValueError):
        build_codebook((3, 1, 2), FrequencyModel.uniform(), "fixed")


def test_encode_empty_sequence():
    cb = build_codebook(range(9), FrequencyModel.uniform(), "fixed")
    assert len(encode(cb, seq())) == 0


def test_encode_thousand_digits_fixed():
    cb = build_codebook(range(1, 10), FrequencyModel.uniform(), "fixed")
    rng = random.Random(4)
    message = SymbolSequence(tuple(rng.randint(1, 9) for _ in range(1000)), level=0)
    assert len(encode(cb, message)) == 4000


def test_encode_robust_concatenation():
    cb = build_codebook((0, 1), FrequencyModel.uniform(), "robust")
    assert encode(cb, seq(0, 1)).to01() == "000111"


def test_encode_unknown_symbol():
    cb = build_codebook((0, 1), FrequencyModel.uniform(), "fixed")
    with pytest.raises(SymbolNotInCodebook):
        encode(cb, seq(0, 7))


def test_decode_round_trip_all_kinds():
    rng = random.Random(8)
    vocab = tuple(range(11))
    counts = {s: rng.randint(1, 50) for s in vocab}
    for kind in ("fixed", "prefix", "robust"):
        cb = build_codebook(vocab, FrequencyModel(counts), kind)
        message = seq(*(rng.choice(vocab) for _ in range(300)))
        assert decode(cb, encode(cb, message)) == message


def test_prefix_decode_extra_bit_dangles():
    cb = build_codebook(range(9), FrequencyModel.uniform(), "prefix")
    bits = encode(cb, seq(0, 5, 8))
    with pytest.raises(DanglingBits):
        decode(cb, BitStream.from_string(bits.to01() + "1"))


def test_robust_decode_unknown_chunk():
    cb = build_codebook((0, 1), FrequencyModel.uniform(), "robust")
    with pytest.raises(UnknownCodeword):
        decode(cb, BitStream.from_string("010"))


def test_correct_decode_single_flip():
    cb = build_codebook((0, 1), FrequencyModel.uniform(), "robust")
    out, corrected = correct_decode(cb, BitStream.from_string("010"))
    assert out == seq(0)
    assert corrected == 1


def test_correct_decode_clean_stream():
    cb = build_codebook(range(5), FrequencyModel.uniform(), "robust")
    bits = encode(cb, seq(4, 0, 3))
    out, corrected = correct_decode(cb, bits)
    assert out == decode(cb, bits)
    assert corrected == 0


def test_correct_decode_two_flips_miscorrect():
    cb = build_codebook((0, 1), FrequencyModel.uniform(), "robust")
    # 011 is distance 2 from 000 but only 1 from 111: lands on the wrong symbol
    out, corrected = correct_decode(cb, BitStream.from_string("011"))
    assert out == seq(1)
    assert corrected == 1


def test_correct_decode_length_check():
    cb = build_codebook((0, 1), FrequencyModel.uniform(), "robust")
    with pytest.raises(LengthNotMultiple):
        correct_decode(cb, BitStream.from_string("0101"))


def test_expected_bits_fixed_uniform():
    cb = build_codebook(range(9), FrequencyModel.uniform(), "fixed")
    assert expected_bits_per_symbol(cb, FrequencyModel.uniform()) == pytest.approx(4.0)


def test_expected_bits_above_entropy():
    cb = build_codebook(range(9), FrequencyModel.uniform(), "prefix")
    h = entropy([1 / 9] * 9)
    assert h == pytest.approx(math.log2(9), abs=1e-12)
    assert h <= expected_bits_per_symbol(cb, FrequencyModel.uniform()) < h + 1


def test_prefix_property_and_kraft_exhaustive():
    rng = random.Random(17)
    for _ in range(25):
        size = rng.randint(2, 20)
        counts = {s: rng.randint(1, 99) for s in range(size)}
        cb = build_codebook(range(size), FrequencyModel(counts), "prefix")
        codes = list(cb.codes.values())
        assert len(set(codes)) == len(codes)
        for i, a in enumerate(codes):
            for j, b in enumerate(codes):
                if i != j:
                    assert not b.startswith(a)
        assert sum(2 ** -len(c) for c in codes) <= 1.0 + 1e-12


def test_prefix_expected_length_within_entropy_bound():
    rng = random.Random(23)
    for _ in range(100):
        size = rng.randint(2, 24)
        counts = {s: rng.randint(1, 200) for s in range(size)}
        model = FrequencyModel(counts)
        cb = build_codebook(range(size), model, "prefix")
        h = entropy(model.probabilities(cb.vocabulary))
        mean_len = expected_bits_per_symbol(cb, model)
        assert h - 1e-9 <= mean_len < h + 1


def test_robust_pairwise_distance_and_single_flip_recovery():
    for size in (2, 3, 7, 12):
        cb = build_codebook(range(size), FrequencyModel.uniform(), "robust", min_distance=3)
        words = [cb.codes[s] for s in cb.vocabulary]
        for i, a in enumerate(words):
            for b in words[i + 1:]:
                assert sum(x != y for x, y in zip(a, b)) >= 3
        for sym in cb.vocabulary:
            code = cb.codes[sym]
            for i in range(len(code)):
                flipped = code[:i] + ("1" if code[i] == "0" else "0") + code[i + 1:]
                out, corrected = correct_decode(cb, BitStream.from_string(flipped))
                assert tuple(out) == (sym,)
                assert corrected == 1


def test_codebooks_are_deterministic():
    rng = random.Random(31)
    counts = {s: rng.randint(1, 30) for s in range(13)}
    for kind in ("fixed", "prefix", "robust"):
        a = build_codebook(range(13), FrequencyModel(counts), kind)
        b = build_codebook(range(13), FrequencyModel(counts), kind)
        assert a.codes == b.codes


def test_bitstream_hex_and_string():
    bits = BitStream.from_string("10110000")
    assert bits.to_hex() == "b0"
    assert BitStream().to_hex() == ""
    with pytest.raises(ValueError):
        BitStream.from_string("012")


@settings(max_examples=80, deadline=None)
@given(
    size=st.integers(1, 24),
    kind=st.sampled_from(["fixed", "prefix", "robust"]),
    data=st.data(),
)
def test_decode_encode_identity_property(size, kind, data):
    vocab = tuple(range(size))
    cb = build_codebook(vocab, FrequencyModel.uniform(), kind)
    message = seq(*data.draw(st.lists(st.sampled_from(vocab), max_size=60)))
    assert decode(cb, encode(cb, message)) == message
