"""Experiment harness: seeded message generation, session sweeps, the
conventional-baseline grid, CSV output and the bandwidth-saving summary.

Configuration lives in a TOML (or JSON) file with sections [library],
[recognizer], [channel], [codec], [protocol], [baseline], [timing] and
[sweep]; unknown sections or keys are rejected so typos fail loudly.
Every derived quantity is seeded, and sweep points own disjoint seed
blocks, so re-running a config reproduces its CSV byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .baseline import BaselineConfig, baseline_accuracy
from .channel import ChannelConfig
from .errors import ConfigError
from .library import SemanticLibrary, SymbolSequence, digit_library, from_file
from .metrics import TimingModel, bitrate_bps
from .protocol import SessionConfig, SessionReport, run_session
from .transform import RecognizerConfig

CSV_HEADER = "scheme,bitrate_bps,accuracy,semantic_err,forward_bits,level,rounds"

SEMANTIC_SCHEME = "semantic"
BASELINE_SCHEME = "baseline"

# seed stride between sweep points: leaves room for per-point replicas
_POINT_SEED_STRIDE = 10_000


@dataclass(frozen=True)
class SweepConfig:
    """Grid shape of one experiment run."""

    seeds_per_point: int = 30
    flip_probs: tuple[float, ...] | None = None
    baseline_min_bps: float = 0.0
    baseline_max_bps: float = 12_000.0
    baseline_points: int = 200

    def __post_init__(self) -> None:
        if self.seeds_per_point < 1:
            raise ConfigError("seeds_per_point must be >= 1")
        if self.baseline_points < 2:
            raise ConfigError("baseline_points must be >= 2")
        if self.baseline_min_bps >= self.baseline_max_bps:
            raise ConfigError("baseline_min_bps must be below baseline_max_bps")


@dataclass(frozen=True)
class CurvePoint:
    """One row of the bandwidth-accuracy curve."""

    scheme: str
    bitrate_bps: float
    accuracy: float
    semantic_err: float
    forward_bits: int
    level: int
    rounds: int

    def to_csv_row(self) -> str:
        return (f"{self.scheme},{self.bitrate_bps:.6f},{self.accuracy:.6f},"
                f"{self.semantic_err:.6f},{self.forward_bits},{self.level},{self.rounds}")


@dataclass
class ExperimentConfig:
    """Fully resolved experiment description."""

    sender_lib: SemanticLibrary
    receiver_lib: SemanticLibrary
    n_symbols: int = 1000
    seed: int = 0
    out_path: str = "sweep.csv"
    p_sub: float = 0.0
    p_del: float = 0.0
    p_ins: float = 0.0
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    codebook_kind: str = "fixed"
    min_distance: int = 3
    strategy: str = "probe_down"
    unknown_policy: str = "nack_all"
    target_level: int | None = None
    count_feedback_bits: bool = False
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    timing: TimingModel = field(default_factory=TimingModel)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def __post_init__(self) -> None:
        if self.n_symbols < 1:
            raise ConfigError("n_symbols must be >= 1")
        if self.sweep.flip_probs is not None and self.channel.kind != "bsc":
            raise ConfigError("a flip_probs sweep needs a bsc channel")

    def session_config(self, seed: int, flip_prob: float | None = None) -> SessionConfig:
        channel = self.channel if flip_prob is None else replace(self.channel, flip_prob=flip_prob)
        return SessionConfig(
            sender_lib=self.sender_lib,
            receiver_lib=self.receiver_lib,
            recognizer=RecognizerConfig.for_library(self.sender_lib, self.p_sub, self.p_del, self.p_ins),
            channel=channel,
            codebook_kind=self.codebook_kind,
            strategy=self.strategy,
            unknown_policy=self.unknown_policy,
            target_level=self.target_level,
            min_distance=self.min_distance,
            seed=seed,
            count_feedback_bits=self.count_feedback_bits,
        )


_SCHEMA = {
    "": {"n_symbols", "seed", "out"},
    "library": {"preset", "sender", "receiver"},
    "recognizer": {"p_sub", "p_del", "p_ins"},
    "channel": {"kind", "flip_prob"},
    "codec": {"kind", "min_distance"},
    "protocol": {"strategy", "unknown_policy", "target_level", "count_feedback_bits"},
    "baseline": {"r_cliff", "r_sat", "acc_max"},
    "timing": {"seconds_per_symbol"},
    "sweep": {"seeds_per_point", "flip_probs", "baseline_min_bps", "baseline_max_bps",
              "baseline_points"},
}


def load_config(path) -> ExperimentConfig:
    """Parse and validate a TOML or JSON experiment file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    else:
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path} is not valid TOML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table/object")
    return config_from_dict(data, base_dir=path.parent)


def config_from_dict(data: dict, base_dir: Path | None = None) -> ExperimentConfig:
    base_dir = Path(".") if base_dir is None else base_dir
    _reject_unknown(data)

    lib_sec = data.get("library", {})
    sender_lib, receiver_lib = _load_libraries(lib_sec, base_dir)
    rec = data.get("recognizer", {})
    chan = data.get("channel", {})
    cod = data.get("codec", {})
    proto = data.get("protocol", {})
    base = data.get("baseline", {})
    timing = data.get("timing", {})
    sweep = data.get("sweep", {})

    flip_probs = sweep.get("flip_probs")
    if flip_probs is not None:
        flip_probs = tuple(float(p) for p in flip_probs)

    try:
        return ExperimentConfig(
            sender_lib=sender_lib,
            receiver_lib=receiver_lib,
            n_symbols=int(data.get("n_symbols", 1000)),
            seed=int(data.get("seed", 0)),
            out_path=str(data.get("out", "sweep.csv")),
            p_sub=float(rec.get("p_sub", 0.0)),
            p_del=float(rec.get("p_del", 0.0)),
            p_ins=float(rec.get("p_ins", 0.0)),
            channel=ChannelConfig(kind=str(chan.get("kind", "noiseless")),
                                  flip_prob=float(chan.get("flip_prob", 0.0))),
            codebook_kind=str(cod.get("kind", "fixed")),
            min_distance=int(cod.get("min_distance", 3)),
            strategy=str(proto.get("strategy", "probe_down")),
            unknown_policy=str(proto.get("unknown_policy", "nack_all")),
            target_level=(None if proto.get("target_level") is None
                          else int(proto["target_level"])),
            count_feedback_bits=bool(proto.get("count_feedback_bits", False)),
            baseline=BaselineConfig(r_cliff=float(base.get("r_cliff", 2000.0)),
                                    r_sat=float(base.get("r_sat", 9000.0)),
                                    acc_max=float(base.get("acc_max", 0.909))),
            timing=TimingModel(seconds_per_symbol=float(timing.get("seconds_per_symbol", 0.5))),
            sweep=SweepConfig(
                seeds_per_point=int(sweep.get("seeds_per_point", 30)),
                flip_probs=flip_probs,
                baseline_min_bps=float(sweep.get("baseline_min_bps", 0.0)),
                baseline_max_bps=float(sweep.get("baseline_max_bps", 12_000.0)),
                baseline_points=int(sweep.get("baseline_points", 200)),
            ),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _reject_unknown(data: dict) -> None:
    for key, value in data.items():
        if key in _SCHEMA[""]:
            continue
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config section or key {key!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"section [{key}] must be a table/object")
        unknown = set(value) - _SCHEMA[key]
        if unknown:
            raise ConfigError(f"unknown keys in [{key}]: {sorted(unknown)}")


def _load_libraries(section: dict, base_dir: Path) -> tuple[SemanticLibrary, SemanticLibrary]:
    preset = section.get("preset")
    sender = section.get("sender")
    if preset is not None and sender is not None:
        raise ConfigError("[library] takes either 'preset' or 'sender', not both")
    if preset is not None:
        if preset != "digits":
            raise ConfigError(f"unknown library preset {preset!r}")
        lib = digit_library()
        return lib, lib
    if sender is None:
        raise ConfigError("[library] needs 'preset' or 'sender'")
    sender_lib = from_file(base_dir / sender)
    receiver = section.get("receiver")
    receiver_lib = sender_lib if receiver is None else from_file(base_dir / receiver)
    return sender_lib, receiver_lib


def generate_message(cfg: ExperimentConfig) -> SymbolSequence:
    """Uniform i.i.d. leaves of the sender library, seeded by the config."""
    leaves = cfg.sender_lib.leaves()
    if not leaves:
        raise ConfigError("sender library has no leaves to sample from")
    rng = np.random.default_rng(cfg.seed)
    picks = rng.integers(0, len(leaves), size=cfg.n_symbols)
    return SymbolSequence(tuple(leaves[i] for i in picks), level=0)


def run_experiment(cfg: ExperimentConfig, out_path=None) -> list[CurvePoint]:
    """Run the semantic points and the baseline grid; write the CSV.

    Each semantic point averages ``seeds_per_point`` sessions over its own
    seed block; the baseline is evaluated analytically on its grid.
    """
    truth = generate_message(cfg)
    points: list[CurvePoint] = []

    flip_values: list[float | None] = (
        [None] if cfg.sweep.flip_probs is None else list(cfg.sweep.flip_probs)
    )
    for index, flip in enumerate(flip_values):
        points.append(_semantic_point(cfg, truth, index, flip))
    points.extend(baseline_curve(cfg))

    target = Path(out_path if out_path is not None else cfg.out_path)
    write_csv(points, target)
    return points


def _semantic_point(cfg: ExperimentConfig, truth: SymbolSequence, index: int,
                    flip: float | None) -> CurvePoint:
    base = cfg.seed + index * _POINT_SEED_STRIDE
    reports: list[SessionReport] = []
    for k in range(cfg.sweep.seeds_per_point):
        session = cfg.session_config(seed=base + k, flip_prob=flip)
        reports.append(run_session(truth, session))
    mean_bits = sum(r.forward_bits for r in reports) / len(reports)
    return CurvePoint(
        scheme=SEMANTIC_SCHEME,
        bitrate_bps=bitrate_bps(mean_bits, cfg.n_symbols, cfg.timing),
        accuracy=sum(r.accuracy for r in reports) / len(reports),
        semantic_err=sum(r.semantic_err for r in reports) / len(reports),
        forward_bits=int(round(mean_bits)),
        level=reports[0].negotiated_level,
        rounds=reports[0].rounds,
    )


def baseline_curve(cfg: ExperimentConfig) -> list[CurvePoint]:
    """The baseline grid alone (no sessions)."""
    grid = np.linspace(cfg.sweep.baseline_min_bps, cfg.sweep.baseline_max_bps,
                       cfg.sweep.baseline_points)
    points = []
    for r in grid:
        acc = baseline_accuracy(float(r), cfg.baseline)
        points.append(CurvePoint(
            scheme=BASELINE_SCHEME,
            bitrate_bps=float(r),
            accuracy=acc,
            semantic_err=1.0 - acc,
            forward_bits=int(round(float(r) * cfg.n_symbols * cfg.timing.seconds_per_symbol)),
            level=0,
            rounds=0,
        ))
    return points


def write_csv(points, path) -> None:
    lines = [CSV_HEADER]
    lines.extend(p.to_csv_row() for p in points)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path) -> list[CurvePoint]:
    """Parse a sweep CSV back into points (used by checks and reports)."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text or text[0] != CSV_HEADER:
        raise ConfigError(f"{path} does not start with the expected header")
    points = []
    for line in text[1:]:
        scheme, rate, acc, err, bits, level, rounds = line.split(",")
        points.append(CurvePoint(scheme, float(rate), float(acc), float(err),
                                 int(bits), int(level), int(rounds)))
    return points


def bandwidth_saving(points) -> float | None:
    """1 - (semantic rate / cheapest baseline rate reaching its accuracy).

    Uses the first semantic point.  When no baseline point reaches the
    semantic accuracy the saving is total, i.e. 1.0.  Returns None when
    the curve has no semantic point.
    """
    semantic = next((p for p in points if p.scheme == SEMANTIC_SCHEME), None)
    if semantic is None:
        return None
    matching = [p.bitrate_bps for p in points
                if p.scheme == BASELINE_SCHEME and p.accuracy >= semantic.accuracy]
    if not matching:
        return 1.0
    cheapest = min(matching)
    if cheapest <= 0:
        return 0.0
    return 1.0 - semantic.bitrate_bps / cheapest
