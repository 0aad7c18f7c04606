"""Bit-level channel between sender and receiver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import BitStream

CHANNEL_KINDS = ("noiseless", "bsc")


@dataclass(frozen=True)
class ChannelConfig:
    """``noiseless`` passes bits through; ``bsc`` flips each bit
    independently with ``flip_prob``."""

    kind: str = "noiseless"
    flip_prob: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValueError(f"flip_prob must be in [0, 1], got {self.flip_prob}")


def transmit(bits: BitStream, cfg: ChannelConfig, seed: int) -> BitStream:
    """Send a stream through the channel; length-preserving, seeded."""
    if cfg.kind == "noiseless" or len(bits) == 0:
        return BitStream(bits.bits)
    rng = np.random.default_rng(seed)
    flips = rng.random(len(bits)) < cfg.flip_prob
    return BitStream(bits.bits ^ flips.astype(np.uint8))
