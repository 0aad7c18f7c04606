"""Parametric accuracy curve of a conventional transmit-then-understand
system, used as the comparison scheme in sweeps.

Below ``r_cliff`` every symbol is corrupted; above ``r_sat`` extra
bandwidth buys nothing.  In between the curve rises smoothly, which gives
the characteristic cliff when plotted against the flat symbol-stream rate.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BaselineConfig:
    r_cliff: float = 2000.0
    r_sat: float = 9000.0
    acc_max: float = 0.909

    def __post_init__(self) -> None:
        if self.r_cliff >= self.r_sat:
            raise ValueError("r_cliff must be below r_sat")
        if not 0.0 < self.acc_max <= 1.0:
            raise ValueError("acc_max must be in (0, 1]")


def baseline_accuracy(bitrate: float, cfg: BaselineConfig) -> float:
    """Accuracy of the conventional scheme at ``bitrate`` bps.

    Exactly 0 at or below the cliff, exactly ``acc_max`` at or above
    saturation, smoothstep (3t^2 - 2t^3) in between; monotone overall.
    """
    if bitrate < 0:
        raise ValueError("bitrate must be non-negative")
    if bitrate <= cfg.r_cliff:
        return 0.0
    if bitrate >= cfg.r_sat:
        return cfg.acc_max
    t = (bitrate - cfg.r_cliff) / (cfg.r_sat - cfg.r_cliff)
    return cfg.acc_max * (3 * t * t - 2 * t * t * t)
