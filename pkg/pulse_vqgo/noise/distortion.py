"""Drive-line distortion: static phase offsets, amplitude scales and a low-amplitude phase bend."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping

from ..errors import ValidationError
from ..models.pulse import PulseProgram

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LineDistortion:
    """
    Per-channel line distortion.

    Attributes:
        phase_offsets: Static phase added to each named channel (rad)
        amplitude_scales: Factor applied to each named channel's base amplitude
        kappa: Phase bend (rad) reached at zero envelope amplitude
        threshold: Envelope amplitude below which the bend is active
    """

    phase_offsets: Mapping[str, float] = field(default_factory=dict)
    amplitude_scales: Mapping[str, float] = field(default_factory=dict)
    kappa: float = 0.0
    threshold: float = 0.1

    def __post_init__(self) -> None:
        if any(s <= 0 for s in self.amplitude_scales.values()):
            raise ValidationError("Amplitude scales must be positive")
        if self.threshold <= 0:
            raise ValidationError("Nonlinearity threshold must be positive")

    @property
    def is_identity(self) -> bool:
        return (
            all(v == 0 for v in self.phase_offsets.values())
            and all(v == 1 for v in self.amplitude_scales.values())
            and self.kappa == 0
        )

    def phase_shift(self, name: str, amplitude: float) -> float:
        bend = self.kappa * max(0.0, 1.0 - amplitude / self.threshold)
        return self.phase_offsets.get(name, 0.0) + bend

    def combined(self, extra_phases: Mapping[str, float]) -> "LineDistortion":
        """Same distortion with additional per-channel phase offsets, e.g. from drift."""
        phases = dict(self.phase_offsets)
        for name, value in extra_phases.items():
            phases[name] = phases.get(name, 0.0) + value
        return LineDistortion(phases, dict(self.amplitude_scales), self.kappa, self.threshold)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phase_offsets": dict(self.phase_offsets),
            "amplitude_scales": dict(self.amplitude_scales),
            "kappa": self.kappa,
            "threshold": self.threshold,
        }


def apply_distortion(prog: PulseProgram, distortion: LineDistortion) -> PulseProgram:
    """phi -> phi + d_phi + kappa * max(0, 1 - A / threshold) and Omega -> s * Omega per channel."""
    if distortion.is_identity:
        return prog
    names = {ch.name for ch in prog.channels}
    unknown = (set(distortion.phase_offsets) | set(distortion.amplitude_scales)) - names
    if unknown:
        logger.debug("Distortion entries for absent channels ignored: %s", sorted(unknown))
    distorted = prog
    for ch in prog.channels:
        peak = ch.peak_envelope(prog.total_duration, prog.sample_period)
        distorted = distorted.replace_channel(
            ch.name,
            phase=ch.phase + distortion.phase_shift(ch.name, peak),
            amplitude=ch.amplitude * distortion.amplitude_scales.get(ch.name, 1.0),
        )
    return distorted
