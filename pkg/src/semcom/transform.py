"""Symbol-level transforms: noisy recognition, abstraction and expansion.

Recognition stands in for the front end that turns an input signal into
leaf symbols; its imperfection is modelled as independent per-symbol
substitution/deletion plus per-slot insertion.  Abstraction rewrites runs
of symbols to their parents, expansion undoes it, and both are pure
functions of the library, so the whole module is safe to call in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonLeafInput
from .library import SemanticLibrary, SymbolId, SymbolSequence


@dataclass(frozen=True)
class RecognizerConfig:
    """Error rates of the signal-to-symbol front end.

    Per input symbol one event is drawn: deletion with ``p_del``,
    substitution by a uniformly random *different* leaf with ``p_sub``,
    otherwise the symbol passes through.  Before the first symbol and
    after every symbol, an extra uniform random leaf is inserted with
    ``p_ins``.
    """

    p_sub: float = 0.0
    p_del: float = 0.0
    p_ins: float = 0.0
    leaf_vocab: tuple[SymbolId, ...] = ()

    def __post_init__(self) -> None:
        for name in ("p_sub", "p_del", "p_ins"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.p_del + self.p_sub > 1.0:
            raise ValueError("p_del + p_sub must not exceed 1")
        if (self.p_sub > 0 or self.p_ins > 0) and not self.leaf_vocab:
            raise ValueError("substitution/insertion noise needs a leaf vocabulary")

    @classmethod
    def for_library(cls, lib: SemanticLibrary, p_sub: float = 0.0, p_del: float = 0.0,
                    p_ins: float = 0.0) -> "RecognizerConfig":
        return cls(p_sub=p_sub, p_del=p_del, p_ins=p_ins, leaf_vocab=lib.leaves())


def recognize(truth: SymbolSequence, cfg: RecognizerConfig, seed: int) -> SymbolSequence:
    """Pass a leaf sequence through the noisy recognizer.

    Deterministic for a given seed.  Raises NonLeafInput if ``truth`` is
    annotated above level 0.
    """
    if truth.level not in (None, 0):
        raise NonLeafInput(f"recognizer input must be leaf-level, got level {truth.level}")
    rng = np.random.default_rng(seed)
    vocab = list(cfg.leaf_vocab)
    out: list[SymbolId] = []

    def maybe_insert() -> None:
        if cfg.p_ins > 0 and rng.random() < cfg.p_ins:
            out.append(vocab[int(rng.integers(len(vocab)))])

    maybe_insert()
    for sym in truth:
        u = rng.random()
        if u < cfg.p_del:
            pass
        elif u < cfg.p_del + cfg.p_sub:
            out.append(_different_leaf(rng, vocab, sym))
        else:
            out.append(sym)
        maybe_insert()
    return SymbolSequence(tuple(out), level=0)


def _different_leaf(rng: np.random.Generator, vocab: list[SymbolId], sym: SymbolId) -> SymbolId:
    """Uniform draw over the leaf vocabulary excluding ``sym``."""
    if sym not in vocab:
        return vocab[int(rng.integers(len(vocab)))]
    if len(vocab) == 1:
        return sym  # no different leaf exists
    i = int(rng.integers(len(vocab) - 1))
    picked = vocab[i]
    return vocab[-1] if picked == sym else picked


def abstract(lib: SemanticLibrary, seq: SymbolSequence, target_level: int) -> SymbolSequence:
    """Greedy leftmost-longest rewrite of composition windows to parents.

    Repeatedly scans left to right and replaces the first (longest at that
    position) contiguous window whose parent has level <= ``target_level``,
    until no window matches.  Never lengthens the sequence, and running it
    twice is the same as running it once.
    """
    symbols = list(seq)
    for sym in symbols:
        lib.node(sym)  # raises UnknownSymbol early
    max_window = lib.max_pattern_length()
    if max_window == 0 or target_level <= 0:
        # no composite node can be at level <= 0, so nothing rewrites
        return SymbolSequence(tuple(symbols), level=lib.sequence_level(symbols))

    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(symbols):
            for width in range(min(max_window, len(symbols) - i), 0, -1):
                match = lib.match_parent(symbols[i : i + width])
                if match is None:
                    continue
                parent, _ = match
                if lib.level(parent) > target_level:
                    continue
                symbols[i : i + width] = [parent]
                changed = True
                break
            else:
                i += 1
                continue
            break  # rewrote: restart the scan from the left
    return SymbolSequence(tuple(symbols), level=lib.sequence_level(symbols))


def inverse_transform(lib: SemanticLibrary, seq: SymbolSequence, target_level: int) -> SymbolSequence:
    """Expand every symbol down to ``target_level``, in order."""
    out: list[SymbolId] = []
    for sym in seq:
        out.extend(lib.expand(sym, target_level))
    return SymbolSequence(tuple(out), level=lib.sequence_level(out))


def render_text(lib: SemanticLibrary, seq: SymbolSequence) -> str:
    """Space-joined labels of the sequence."""
    return " ".join(lib.label(sym) for sym in seq)
