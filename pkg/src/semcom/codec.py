"""Symbol <-> bit mapping: fixed, Huffman-prefix and distance-robust codes.

All three constructions are canonical: the same (vocabulary, model, kind)
always yields bit-identical tables, so sender and receiver can derive the
codebook independently and no table ever crosses the channel.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DanglingBits,
    EmptyVocabulary,
    LengthNotMultiple,
    SymbolNotInCodebook,
    UnknownCodeword,
)
from .library import SymbolId, SymbolSequence

CODEBOOK_KINDS = ("fixed", "prefix", "robust")


class BitStream:
    """Immutable run of bits backed by a uint8 array."""

    __slots__ = ("bits",)

    def __init__(self, bits=()) -> None:
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            arr = arr.reshape(-1)
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        arr.setflags(write=False)
        self.bits = arr

    @classmethod
    def from_string(cls, s: str) -> "BitStream":
        if s and set(s) - {"0", "1"}:
            raise ValueError("bit string may only contain 0 and 1")
        return cls(np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0"))

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.bits.tolist())

    def to_hex(self) -> str:
        """Bits packed big-endian into bytes (zero-padded) as lowercase hex."""
        if not len(self):
            return ""
        return np.packbits(self.bits).tobytes().hex()

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other) -> bool:
        if isinstance(other, BitStream):
            return np.array_equal(self.bits, other.bits)
        return NotImplemented

    def __repr__(self) -> str:
        shown = self.to01() if len(self) <= 32 else self.to01()[:32] + "..."
        return f"BitStream({shown!r}, length={len(self)})"


@dataclass(frozen=True)
class FrequencyModel:
    """Symbol weights for code construction; ``counts=None`` means uniform."""

    counts: dict[SymbolId, int] | None = None

    def __post_init__(self) -> None:
        if self.counts is not None:
            if not self.counts:
                raise ValueError("counts must be non-empty")
            if any(c <= 0 for c in self.counts.values()):
                raise ValueError("all counts must be positive")

    @classmethod
    def uniform(cls) -> "FrequencyModel":
        return cls(counts=None)

    def covers(self, vocab) -> bool:
        return self.counts is None or all(s in self.counts for s in vocab)

    def weights(self, vocab) -> list[int]:
        if self.counts is None:
            return [1] * len(vocab)
        missing = [s for s in vocab if s not in self.counts]
        if missing:
            raise ValueError(f"model does not cover symbols {missing}")
        return [self.counts[s] for s in vocab]

    def probabilities(self, vocab) -> list[float]:
        w = self.weights(vocab)
        total = sum(w)
        return [x / total for x in w]


@dataclass(frozen=True)
class CodeBook:
    """Canonical symbol->codeword table.

    fixed:  equal-length binary ranks, length ceil(log2 |V|) (min 1).
    prefix: canonical Huffman, ties broken by symbol id.
    robust: equal-length greedy code with pairwise Hamming distance
            >= ``min_distance``; corrects single flips when >= 3.
    """

    kind: str
    codes: dict[SymbolId, str]
    vocabulary: tuple[SymbolId, ...]
    min_distance: int | None = None
    _decode_table: dict[str, SymbolId] = field(repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_decode_table", {c: s for s, c in self.codes.items()})

    @property
    def code_length(self) -> int | None:
        """Common codeword length for fixed/robust books, else None."""
        if self.kind == "prefix":
            return None
        return len(next(iter(self.codes.values())))


def build_codebook(vocab, model: FrequencyModel, kind: str, min_distance: int = 3) -> CodeBook:
    """Construct a codebook over an ascending symbol vocabulary."""
    vocab = tuple(vocab)
    if not vocab:
        raise EmptyVocabulary("cannot build a codebook over an empty vocabulary")
    if list(vocab) != sorted(set(vocab)):
        raise ValueError("vocabulary must be strictly ascending symbol ids")
    if kind not in CODEBOOK_KINDS:
        raise ValueError(f"unknown codebook kind {kind!r}")
    if not model.covers(vocab):
        raise ValueError("frequency model does not cover the vocabulary")

    if kind == "fixed":
        width = max(1, (len(vocab) - 1).bit_length())
        codes = {s: format(i, f"0{width}b") for i, s in enumerate(vocab)}
        return CodeBook(kind, codes, vocab)
    if kind == "prefix":
        lengths = _huffman_lengths(vocab, model.weights(vocab))
        codes = _canonical_codes(lengths)
        return CodeBook(kind, codes, vocab)
    words = _greedy_distance_code(len(vocab), min_distance)
    width = len(words[0])
    codes = {s: words[i] for i, s in enumerate(vocab)}
    return CodeBook(kind, codes, vocab, min_distance=min_distance)


def _huffman_lengths(vocab, weights) -> dict[SymbolId, int]:
    """Optimal prefix code lengths; deterministic tie-breaking."""
    if len(vocab) == 1:
        return {vocab[0]: 1}
    # heap entries: (weight, insertion order, symbols in subtree)
    heap: list[tuple[int, int, list[SymbolId]]] = [
        (w, i, [s]) for i, (s, w) in enumerate(zip(vocab, weights))
    ]
    heapq.heapify(heap)
    order = len(heap)
    lengths = {s: 0 for s in vocab}
    while len(heap) > 1:
        w1, _, syms1 = heapq.heappop(heap)
        w2, _, syms2 = heapq.heappop(heap)
        for s in syms1 + syms2:
            lengths[s] += 1
        heapq.heappush(heap, (w1 + w2, order, syms1 + syms2))
        order += 1
    return lengths


def _canonical_codes(lengths: dict[SymbolId, int]) -> dict[SymbolId, str]:
    """Assign canonical codes, shortest first, same-length ties by id."""
    codes: dict[SymbolId, str] = {}
    code = 0
    prev_len = None
    for sym, length in sorted(lengths.items(), key=lambda kv: (kv[1], kv[0])):
        if prev_len is not None:
            code = (code + 1) << (length - prev_len)
        codes[sym] = format(code, f"0{length}b")
        prev_len = length
    return codes


def _greedy_distance_code(size: int, min_distance: int) -> list[str]:
    """Shortest greedy lexicographic code with >= ``size`` words at pairwise
    Hamming distance >= ``min_distance``."""
    for width in range(1, 64):
        accepted: list[int] = []
        for word in range(1 << width):
            if all((word ^ a).bit_count() >= min_distance for a in accepted):
                accepted.append(word)
                if len(accepted) == size:
                    return [format(w, f"0{width}b") for w in accepted]
    raise ValueError(f"no {min_distance}-distant code of size {size} below width 64")


def encode(cb: CodeBook, seq: SymbolSequence) -> BitStream:
    """Concatenate codewords; an empty sequence yields an empty stream."""
    try:
        return BitStream.from_string("".join(cb.codes[s] for s in seq))
    except KeyError as exc:
        raise SymbolNotInCodebook(f"symbol {exc.args[0]} has no codeword") from None


def decode(cb: CodeBook, bits: BitStream) -> SymbolSequence:
    """Exact inverse of :func:`encode`; never guesses.

    Raises DanglingBits when the stream ends mid-codeword and, for
    fixed/robust books, UnknownCodeword when a chunk is not in the table
    (use :func:`correct_decode` to tolerate corruption).
    """
    if cb.kind == "prefix":
        return _decode_prefix(cb, bits)
    width = cb.code_length
    s = bits.to01()
    if len(s) % width:
        raise DanglingBits(f"{len(s)} bits is not a whole number of {width}-bit codewords")
    symbols = []
    for i in range(0, len(s), width):
        chunk = s[i : i + width]
        sym = cb._decode_table.get(chunk)
        if sym is None:
            raise UnknownCodeword(f"chunk {chunk} not in codebook")
        symbols.append(sym)
    return SymbolSequence(tuple(symbols), level=None)


def _decode_prefix(cb: CodeBook, bits: BitStream) -> SymbolSequence:
    table = cb._decode_table
    symbols = []
    buffer = ""
    for b in bits.bits.tolist():
        buffer += "1" if b else "0"
        sym = table.get(buffer)
        if sym is not None:
            symbols.append(sym)
            buffer = ""
    if buffer:
        raise DanglingBits(f"stream ended inside codeword prefix {buffer!r}")
    return SymbolSequence(tuple(symbols), level=None)


def correct_decode(cb: CodeBook, bits: BitStream) -> tuple[SymbolSequence, int]:
    """Nearest-codeword decoding for robust books.

    Each chunk maps to the codeword at minimum Hamming distance, ties to
    the lexicographically smallest codeword.  Returns the sequence and the
    number of chunks that needed correction.  With min_distance >= 3 every
    single-bit corruption is undone.
    """
    if cb.kind != "robust":
        raise ValueError("correct_decode needs a robust codebook")
    return nearest_decode(cb, bits)


def nearest_decode(cb: CodeBook, bits: BitStream) -> tuple[SymbolSequence, int]:
    """Chunked nearest-codeword decode for any equal-width codebook."""
    width = cb.code_length
    if width is None:
        raise ValueError("nearest_decode needs an equal-width codebook")
    if len(bits) % width:
        raise LengthNotMultiple(f"{len(bits)} bits is not a multiple of chunk width {width}")
    # lexicographic order over equal-length bit strings == numeric order
    table = sorted((int(code, 2), sym) for sym, code in cb.codes.items())
    s = bits.to01()
    symbols = []
    corrected = 0
    for i in range(0, len(s), width):
        chunk = int(s[i : i + width], 2)
        best_sym, best_dist = None, width + 1
        for word, sym in table:
            d = (chunk ^ word).bit_count()
            if d < best_dist:
                best_sym, best_dist = sym, d
                if d == 0:
                    break
        symbols.append(best_sym)
        if best_dist > 0:
            corrected += 1
    return SymbolSequence(tuple(symbols), level=None), corrected


def expected_bits_per_symbol(cb: CodeBook, model: FrequencyModel) -> float:
    """Model-weighted mean codeword length."""
    probs = model.probabilities(cb.vocabulary)
    return sum(p * len(cb.codes[s]) for p, s in zip(probs, cb.vocabulary))
