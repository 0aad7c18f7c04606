"""Symbol-level semantic communication simulator.

Transmits abstracted semantic symbols instead of raw signals through a
library / abstraction / coding / channel / negotiation pipeline, and
measures the bandwidth-fidelity tradeoff against a parametric
conventional baseline.
"""

from .baseline import BaselineConfig, baseline_accuracy
from .channel import ChannelConfig, transmit
from .codec import (
    BitStream,
    CodeBook,
    FrequencyModel,
    build_codebook,
    correct_decode,
    decode,
    encode,
    expected_bits_per_symbol,
)
from .experiment import (
    CurvePoint,
    ExperimentConfig,
    bandwidth_saving,
    load_config,
    run_experiment,
)
from .library import (
    SemanticLibrary,
    SemanticNode,
    SymbolId,
    SymbolSequence,
    build_library,
    digit_library,
    from_file,
    to_file,
)
from .metrics import (
    TimingModel,
    bitrate_bps,
    levenshtein,
    positional_accuracy,
    semantic_error,
)
from .protocol import (
    NegotiationOutcome,
    SessionConfig,
    SessionReport,
    Teach,
    apply_teach,
    negotiate,
    resolve_unknown,
    run_session,
)
from .transform import RecognizerConfig, abstract, inverse_transform, recognize, render_text

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "BitStream",
    "ChannelConfig",
    "CodeBook",
    "CurvePoint",
    "ExperimentConfig",
    "FrequencyModel",
    "NegotiationOutcome",
    "RecognizerConfig",
    "SemanticLibrary",
    "SemanticNode",
    "SessionConfig",
    "SessionReport",
    "SymbolId",
    "SymbolSequence",
    "Teach",
    "TimingModel",
    "abstract",
    "apply_teach",
    "bandwidth_saving",
    "bitrate_bps",
    "build_codebook",
    "build_library",
    "baseline_accuracy",
    "correct_decode",
    "decode",
    "digit_library",
    "encode",
    "expected_bits_per_symbol",
    "from_file",
    "inverse_transform",
    "levenshtein",
    "load_config",
    "negotiate",
    "positional_accuracy",
    "recognize",
    "render_text",
    "resolve_unknown",
    "run_experiment",
    "run_session",
    "semantic_error",
    "to_file",
    "transmit",
]
