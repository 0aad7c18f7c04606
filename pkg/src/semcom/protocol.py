"""Session orchestration: level negotiation, transmission and receiver-side
interpretation.

A session runs the whole understand-then-transmit chain between two
libraries that share their leaf vocabulary but may otherwise differ:

    recognize -> negotiate level -> abstract -> encode -> channel
              -> decode -> resolve unknown symbols -> expand to leaves

Negotiation strategies:

* ``probe_down``   - try the highest level the sender can use for this
                     message and walk down one level per negative
                     feedback until the abstraction is fully known to the
                     receiver.  Level 0 always terminates because leaves
                     are shared.
* ``announce``     - the receiver states its maximum level up front; the
                     sender uses the minimum of the two.  One round, but
                     no guarantee the receiver knows the content at that
                     level when the libraries diverge.
* ``probe_teach``  - one attempt at the top level; on negative feedback
                     the sender teaches every unknown definition
                     (children first) and the original level then
                     succeeds.

Feedback and teaching messages are costed with fixed header conventions
(16-bit header, 8 bits per referenced id) but the accounting is off by
default: ``count_feedback_bits`` controls whether those counters appear
in the report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from . import codec
from .channel import ChannelConfig, transmit
from .codec import CODEBOOK_KINDS, BitStream, FrequencyModel
from .errors import ConfigError, LeafNotShared
from .library import SemanticLibrary, SymbolId, SymbolSequence
from .metrics import positional_accuracy, semantic_error
from .transform import RecognizerConfig, abstract, inverse_transform, recognize

STRATEGIES = ("probe_down", "announce", "probe_teach")
UNKNOWN_POLICIES = ("drop_modifier", "nack_all")

FEEDBACK_HEADER_BITS = 16
ID_BITS = 8


@dataclass(frozen=True)
class Data:
    """Forward payload message."""
    level: int
    payload: BitStream


@dataclass(frozen=True)
class FeedbackNack:
    """Receiver cannot use the offered level; may list unknown symbols."""
    unknown: tuple[SymbolId, ...] = ()


@dataclass(frozen=True)
class FeedbackLevel:
    """Receiver announces the highest level of its library."""
    level: int


@dataclass(frozen=True)
class FeedbackAck:
    """Receiver accepted the offered level."""


@dataclass(frozen=True)
class Teach:
    """Definition of one symbol: id, label and ordered children."""
    id: SymbolId
    label: str
    children: tuple[SymbolId, ...]
    modifier: bool = False


def feedback_bits(msg) -> int:
    """Wire cost of one feedback message under the fixed header convention."""
    if isinstance(msg, FeedbackNack):
        return FEEDBACK_HEADER_BITS + ID_BITS * len(msg.unknown)
    if isinstance(msg, (FeedbackLevel, FeedbackAck)):
        return FEEDBACK_HEADER_BITS
    raise TypeError(f"not a feedback message: {msg!r}")


def teach_bits(msg: Teach) -> int:
    return FEEDBACK_HEADER_BITS + ID_BITS * (1 + len(msg.children))


class NegotiationOutcome(NamedTuple):
    level: int
    rounds: int
    feedback_bits: int
    teach_transcript: tuple[Teach, ...]


def apply_teach(lib: SemanticLibrary, transcript) -> SemanticLibrary:
    """Insert every taught definition into ``lib`` (ids preserved, so the
    two ends keep agreeing on symbol numbering)."""
    for msg in transcript:
        lib = lib.with_node(msg.id, msg.label, msg.children, msg.modifier)
    return lib


def negotiate(sender_lib: SemanticLibrary, receiver_lib: SemanticLibrary, strategy: str,
              message_symbols: SymbolSequence, max_level: int | None = None) -> NegotiationOutcome:
    """Agree on the abstraction level for one message.

    ``max_level`` caps the level the sender will even attempt (None means
    its library maximum).  ``rounds`` counts forward attempts; probing
    attempts are level-only and carry no payload cost.  Raises
    LeafNotShared when a message leaf is missing on either side.
    """
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    for sym in message_symbols:
        node = sender_lib.node(sym)
        if node.is_leaf and sym not in receiver_lib:
            raise LeafNotShared(f"leaf {sym} missing from receiver library")

    cap = sender_lib.max_level() if max_level is None else max_level
    start = abstract(sender_lib, message_symbols, cap).level or 0

    if strategy == "announce":
        level = min(start, receiver_lib.max_level())
        return NegotiationOutcome(level, 1, feedback_bits(FeedbackLevel(level)), ())

    if strategy == "probe_down":
        fb = 0
        level = start
        rounds = 0
        while True:
            rounds += 1
            attempt = abstract(sender_lib, message_symbols, level)
            unknown = [s for s in attempt if s not in receiver_lib]
            if not unknown:
                fb += feedback_bits(FeedbackAck())
                return NegotiationOutcome(level, rounds, fb, ())
            fb += feedback_bits(FeedbackNack())  # level-only probe
            level -= 1
            if level < 0:
                # only reachable when the message itself holds unshared
                # symbols, i.e. the leaf precondition was violated
                raise LeafNotShared(f"symbols {sorted(set(unknown))} cannot be reduced "
                                    "to shared leaves")

    # probe_teach
    attempt = abstract(sender_lib, message_symbols, start)
    unknown = _unique([s for s in attempt if s not in receiver_lib])
    if not unknown:
        return NegotiationOutcome(start, 1, feedback_bits(FeedbackAck()), ())
    fb = feedback_bits(FeedbackNack(tuple(unknown)))
    transcript: list[Teach] = []
    taught: set[SymbolId] = set()
    for sym in unknown:
        _teach_subtree(sender_lib, receiver_lib, sym, taught, transcript)
    fb += feedback_bits(FeedbackAck())
    return NegotiationOutcome(start, 2, fb, tuple(transcript))


def _teach_subtree(sender_lib: SemanticLibrary, receiver_lib: SemanticLibrary,
                   sym: SymbolId, taught: set[SymbolId], transcript: list[Teach]) -> None:
    """Emit Teach messages for ``sym`` and its unknown descendants,
    children first so every definition lands on known ground."""
    if sym in taught or sym in receiver_lib:
        return
    node = sender_lib.node(sym)
    for child in node.children:
        _teach_subtree(sender_lib, receiver_lib, child, taught, transcript)
    taught.add(sym)
    transcript.append(Teach(node.id, node.label, node.children, node.modifier))


def _unique(items):
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def resolve_unknown(receiver_lib: SemanticLibrary, seq: SymbolSequence, policy: str,
                    modifier_ids=frozenset()) -> tuple[SymbolSequence, list[SymbolId]]:
    """Receiver-side handling of symbols outside its library.

    ``modifier_ids`` is the set of symbols the sender flagged as
    modifiers (carried as payload metadata).  Under ``drop_modifier``,
    unknown modifiers are silently removed; other unknowns stay in place
    and are reported back.  Under ``nack_all`` the sequence is untouched
    and every unknown is reported.
    """
    if policy not in UNKNOWN_POLICIES:
        raise ConfigError(f"unknown policy {policy!r}")
    unknown = [s for s in seq if s not in receiver_lib]
    if not unknown:
        return SymbolSequence(tuple(seq), level=seq.level), []
    if policy == "nack_all":
        return SymbolSequence(tuple(seq), level=None), _unique(unknown)
    modifier_ids = frozenset(modifier_ids)
    kept = [s for s in seq if s in receiver_lib or s not in modifier_ids]
    unresolved = _unique([s for s in unknown if s not in modifier_ids])
    return SymbolSequence(tuple(kept), level=None), unresolved


@dataclass(frozen=True)
class SessionConfig:
    """Everything one session needs besides the message itself."""

    sender_lib: SemanticLibrary
    receiver_lib: SemanticLibrary
    recognizer: RecognizerConfig
    channel: ChannelConfig
    codebook_kind: str = "fixed"
    strategy: str = "probe_down"
    unknown_policy: str = "nack_all"
    target_level: int | None = None
    min_distance: int = 3
    seed: int = 0
    count_feedback_bits: bool = False

    def __post_init__(self) -> None:
        if self.codebook_kind not in CODEBOOK_KINDS:
            raise ConfigError(f"unknown codebook kind {self.codebook_kind!r}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.unknown_policy not in UNKNOWN_POLICIES:
            raise ConfigError(f"unknown policy {self.unknown_policy!r}")
        if self.channel.kind == "bsc" and self.codebook_kind == "prefix":
            raise ConfigError("prefix codes desynchronize under bit flips; "
                              "use fixed or robust codebooks on a bsc channel")
        if self.target_level is not None and self.target_level < 0:
            raise ConfigError("target_level must be >= 0")


@dataclass
class SessionReport:
    """Full trace of one session.

    ``accuracy`` is the position-wise score when intended and interpreted
    sequences align in length, else its length-tolerant counterpart
    ``1 - semantic_err``.  ``receiver_library`` is the post-teaching
    library, kept so later sessions can reuse what this one taught; it is
    not serialized.
    """

    intended: SymbolSequence
    transformed: SymbolSequence
    received: SymbolSequence
    interpreted: SymbolSequence
    negotiated_level: int
    rounds: int
    forward_bits: int
    feedback_bits: int
    teach_bits: int
    corrected_chunks: int
    accuracy: float
    semantic_err: float
    payload_hex: str = ""
    received_hex: str = ""
    unresolved: tuple[SymbolId, ...] = ()
    receiver_library: SemanticLibrary | None = field(default=None, repr=False, compare=False)

    def to_json_dict(self) -> dict:
        return {
            "intended": list(self.intended),
            "transformed": list(self.transformed),
            "received": list(self.received),
            "interpreted": list(self.interpreted),
            "level": self.negotiated_level,
            "rounds": self.rounds,
            "forward_bits": self.forward_bits,
            "feedback_bits": self.feedback_bits,
            "teach_bits": self.teach_bits,
            "corrected_chunks": self.corrected_chunks,
            "accuracy": self.accuracy,
            "semantic_err": self.semantic_err,
            "payload_hex": self.payload_hex,
            "received_hex": self.received_hex,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)


def run_session(truth: SymbolSequence, cfg: SessionConfig) -> SessionReport:
    """Run one full session; deterministic for a given configuration.

    The recognizer draws from ``cfg.seed`` and the channel from
    ``cfg.seed + 1`` so the two noise sources stay independent.
    """
    recognized = recognize(truth, cfg.recognizer, cfg.seed)

    outcome = negotiate(cfg.sender_lib, cfg.receiver_lib, cfg.strategy, recognized,
                        max_level=cfg.target_level)
    receiver_lib = apply_teach(cfg.receiver_lib, outcome.teach_transcript)
    taught_bits = sum(teach_bits(t) for t in outcome.teach_transcript)

    transformed = abstract(cfg.sender_lib, recognized, outcome.level)

    # Both ends derive the same table: everything the receiver knows at the
    # negotiated level, plus whatever the sender actually transmits (the
    # union only differs under announce with diverging libraries).
    vocab = sorted(set(receiver_lib.symbols_at_or_below(outcome.level)) | set(transformed))
    codebook = codec.build_codebook(vocab, FrequencyModel.uniform(), cfg.codebook_kind,
                                    min_distance=cfg.min_distance)

    payload = codec.encode(codebook, transformed)
    arrived = transmit(payload, cfg.channel, cfg.seed + 1)

    corrected = 0
    if cfg.codebook_kind == "prefix":
        received = codec.decode(codebook, arrived)
    else:
        # fixed codes have no slack but a corrupted chunk still decodes to
        # its nearest codeword rather than aborting the session
        received, corrected = codec.nearest_decode(codebook, arrived)

    modifier_ids = frozenset(s for s in transformed if cfg.sender_lib.node(s).modifier)
    resolved, unresolved = resolve_unknown(receiver_lib, received, cfg.unknown_policy,
                                           modifier_ids)
    # symbols that stayed unknown cannot be expanded and are lost here
    expandable = SymbolSequence(tuple(s for s in resolved if s in receiver_lib), level=None)
    interpreted = inverse_transform(receiver_lib, expandable, 0)

    err = semantic_error(truth, interpreted)
    if len(truth) == len(interpreted) and len(truth) > 0:
        accuracy = positional_accuracy(truth, interpreted)
    else:
        accuracy = 1.0 - err

    return SessionReport(
        intended=truth,
        transformed=transformed,
        received=received,
        interpreted=interpreted,
        negotiated_level=outcome.level,
        rounds=outcome.rounds,
        forward_bits=len(payload),
        feedback_bits=outcome.feedback_bits if cfg.count_feedback_bits else 0,
        teach_bits=taught_bits if cfg.count_feedback_bits else 0,
        corrected_chunks=corrected,
        accuracy=accuracy,
        semantic_err=err,
        payload_hex=payload.to_hex(),
        received_hex=arrived.to_hex(),
        unresolved=tuple(unresolved),
        receiver_library=receiver_lib,
    )
