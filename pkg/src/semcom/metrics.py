"""Fidelity metrics and the bit-rate bookkeeping used by experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySequence, LengthMismatch
from .library import SymbolSequence


@dataclass(frozen=True)
class TimingModel:
    """Wall-clock duration represented by one leaf symbol of the source."""

    seconds_per_symbol: float = 0.5

    def __post_init__(self) -> None:
        if self.seconds_per_symbol <= 0:
            raise ValueError("seconds_per_symbol must be positive")


def positional_accuracy(s: SymbolSequence, s_hat: SymbolSequence) -> float:
    """Fraction of positions where both sequences agree.

    Defined only for equal-length, non-empty sequences: the position-wise
    comparison presumes the two are already aligned.
    """
    a, b = tuple(s), tuple(s_hat)
    if not a or not b:
        raise EmptySequence("positional accuracy needs non-empty sequences")
    if len(a) != len(b):
        raise LengthMismatch(f"lengths differ: {len(a)} vs {len(b)}")
    mismatches = sum(1 for x, y in zip(a, b) if x != y)
    return 1.0 - mismatches / len(a)


def levenshtein(a, b) -> int:
    """Edit distance (insert/delete/substitute, unit costs).

    Row-vectorised: the in-row insertion chain collapses to a running
    minimum of (cost - column), so each row is a handful of array ops.
    """
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    b_arr = np.asarray(b, dtype=np.int64)
    cols = np.arange(len(b) + 1, dtype=np.int64)
    prev = cols.copy()
    row = np.empty(len(b) + 1, dtype=np.int64)
    for i, x in enumerate(a, start=1):
        sub = prev[:-1] + (b_arr != x)
        row[0] = i
        row[1:] = np.minimum(prev[1:] + 1, sub)
        np.minimum.accumulate(row - cols, out=row)
        row += cols
        prev, row = row, prev
    return int(prev[-1])


def semantic_error(s: SymbolSequence, s_hat: SymbolSequence) -> float:
    """Length-tolerant divergence: edit distance over the longer length.

    Symmetric, in [0, 1], zero exactly when the sequences are equal, and 0
    by convention when both are empty.
    """
    a, b = tuple(s), tuple(s_hat)
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def bitrate_bps(total_bits: int, n_leaf_symbols: int, timing: TimingModel) -> float:
    """Bits per second of source time covered by ``n_leaf_symbols``."""
    if n_leaf_symbols < 1:
        raise ValueError("n_leaf_symbols must be >= 1")
    return total_bits / (n_leaf_symbols * timing.seconds_per_symbol)
