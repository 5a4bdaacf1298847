"""Pulse program data model: envelopes, drive channels and virtual-Z frames."""

import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ValidationError

# IBM-style AWG sample period, 2/9 ns, expressed in microseconds.
DEFAULT_SAMPLE_PERIOD = 2.0e-3 / 9.0
DEFAULT_RAMP_SAMPLES = 10

ENVELOPE_KINDS = ("flat", "floquet", "samples")


@dataclass(frozen=True, eq=False)
class Envelope:
    """Dimensionless drive envelope with values in [-1, 1]."""

    kind: str = "flat"
    level: float = 1.0
    weights: Tuple[float, ...] = ()
    frequency: float = 0.0
    samples: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ENVELOPE_KINDS:
            raise ValidationError(f"Unknown envelope kind: {self.kind}")
        if self.kind == "flat" and abs(self.level) > 1.0 + 1e-12:
            raise ValidationError("Flat envelope level must lie in [-1, 1]")
        if self.kind == "floquet":
            if self.frequency <= 0:
                raise ValidationError("Floquet frequency must be positive")
            if sum(abs(w) for w in self.weights) > 1.0 + 1e-12:
                raise ValidationError("Floquet weights must keep the envelope inside [-1, 1]")
        if self.kind == "samples" and any(abs(s) > 1.0 + 1e-12 for s in self.samples):
            raise ValidationError("Sampled envelope values must lie in [-1, 1]")

    @classmethod
    def flat(cls, level: float = 1.0) -> "Envelope":
        return cls(kind="flat", level=float(level))

    def evaluate(self, t: np.ndarray, sample_period: float = DEFAULT_SAMPLE_PERIOD) -> np.ndarray:
        """Envelope values at times ``t``; sampled envelopes hold each value for one period."""
        t = np.asarray(t, dtype=float)
        if self.kind == "flat":
            return np.full(t.shape, self.level)
        if self.kind == "floquet":
            k = np.arange(len(self.weights), dtype=float)
            return np.cos(np.multiply.outer(t, k * self.frequency)) @ np.asarray(self.weights)
        index = np.clip((t / sample_period).astype(int), 0, len(self.samples) - 1)
        return np.asarray(self.samples, dtype=float)[index]

    def is_zero(self) -> bool:
        if self.kind == "flat":
            return self.level == 0.0
        if self.kind == "floquet":
            return not any(self.weights)
        return not any(self.samples)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "level": self.level,
            "weights": list(self.weights),
            "frequency": self.frequency,
            "samples": list(self.samples),
        }


@dataclass(frozen=True)
class VirtualZ:
    """
    Software frame rotation of one qubit.

    The frame angle theta(t) is piecewise-linear through ``knots`` given as
    (fraction of the program, angle) pairs; without knots it ramps linearly
    from 0 to ``angle`` over the program. Every channel whose carrier is the
    qubit's frequency picks up the phase -theta(t); the virtual-Z rate is
    d^Z(t) = theta'(t) / 2.
    """

    qubit: int
    angle: float = 0.0
    knots: Tuple[Tuple[float, float], ...] = ()

    def _knot_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.knots:
            fractions, angles = zip(*self.knots)
            return np.asarray(fractions, dtype=float), np.asarray(angles, dtype=float)
        return np.array([0.0, 1.0]), np.array([0.0, self.angle])

    def angle_at(self, t: np.ndarray, total_duration: float) -> np.ndarray:
        fractions, angles = self._knot_arrays()
        return np.interp(np.asarray(t, dtype=float) / total_duration, fractions, angles)

    def final_angle(self) -> float:
        _, angles = self._knot_arrays()
        return float(angles[-1])


@dataclass(frozen=True)
class DriveChannel:
    """
    One microwave drive line.

    ``target`` is the driven transmon; the carrier is the frequency of
    transmon ``carrier_qubit`` shifted by ``detuning`` (rad/us), so a
    resonant drive has carrier_qubit == target and a cross-resonance drive
    uses the neighbour's frequency. The field on the line is
    Omega * Re[(d^X - i d^Y) exp(-i theta(t)) exp(i(w_c t + phi))].
    """

    name: str
    target: int
    carrier_qubit: int
    amplitude: float
    phase: float = 0.0
    detuning: float = 0.0
    envelope_x: Envelope = field(default_factory=Envelope.flat)
    envelope_y: Envelope = field(default_factory=lambda: Envelope.flat(0.0))
    ramp_samples: int = 0

    def __post_init__(self) -> None:
        if not self.name or not self.name.strip():
            raise ValidationError("Channel name cannot be empty")
        if self.amplitude < 0:
            raise ValidationError("Channel amplitude must be non-negative")
        if self.ramp_samples < 0:
            raise ValidationError("Ramp length cannot be negative")

    @property
    def is_cross_resonant(self) -> bool:
        return self.carrier_qubit != self.target

    def ramp(self, t: np.ndarray, total_duration: float, sample_period: float) -> np.ndarray:
        """Gaussian rise and fall with sigma equal to half the ramp length."""
        t = np.asarray(t, dtype=float)
        if self.ramp_samples == 0:
            return np.ones(t.shape)
        length = self.ramp_samples * sample_period
        sigma = length / 2.0
        rise = np.where(t < length, np.exp(-((t - length) ** 2) / (2 * sigma**2)), 1.0)
        fall_start = total_duration - length
        fall = np.where(t > fall_start, np.exp(-((t - fall_start) ** 2) / (2 * sigma**2)), 1.0)
        return rise * fall

    def complex_envelope(
        self, t: np.ndarray, total_duration: float, sample_period: float
    ) -> np.ndarray:
        """(d^X - i d^Y) times the ramp at times ``t``."""
        ramp = self.ramp(t, total_duration, sample_period)
        return ramp * (
            self.envelope_x.evaluate(t, sample_period) - 1j * self.envelope_y.evaluate(t, sample_period)
        )

    def peak_envelope(self, total_duration: float, sample_period: float) -> float:
        """Largest |d^X - i d^Y| over the sample grid."""
        n_samples = int(round(total_duration / sample_period))
        centers = (np.arange(n_samples) + 0.5) * sample_period
        return float(np.max(np.abs(self.complex_envelope(centers, total_duration, sample_period))))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DriveChannel":
        def envelope(value: Optional[Dict[str, Any]], default: Envelope) -> Envelope:
            if not value:
                return default
            return Envelope(
                kind=value.get("kind", "flat"),
                level=float(value.get("level", 1.0)),
                weights=tuple(value.get("weights", ())),
                frequency=float(value.get("frequency", 0.0)),
                samples=tuple(value.get("samples", ())),
            )

        return cls(
            name=str(data["name"]),
            target=int(data["target"]),
            carrier_qubit=int(data.get("carrier_qubit", data["target"])),
            amplitude=float(data["amplitude"]),
            phase=float(data.get("phase", 0.0)),
            detuning=float(data.get("detuning", 0.0)),
            envelope_x=envelope(data.get("envelope_x"), Envelope.flat()),
            envelope_y=envelope(data.get("envelope_y"), Envelope.flat(0.0)),
            ramp_samples=int(data.get("ramp_samples", 0)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "target": self.target,
            "carrier_qubit": self.carrier_qubit,
            "amplitude": self.amplitude,
            "phase": self.phase,
            "detuning": self.detuning,
            "envelope_x": self.envelope_x.to_dict(),
            "envelope_y": self.envelope_y.to_dict(),
            "ramp_samples": self.ramp_samples,
        }

    def __str__(self) -> str:
        kind = "CR" if self.is_cross_resonant else "resonant"
        return (
            f"{self.name}: {kind} on Q{self.target + 1} at w{self.carrier_qubit + 1}, "
            f"Omega/2pi={self.amplitude / (2 * math.pi):.4f} MHz, phi={self.phase:.4f}"
        )


@dataclass(frozen=True)
class PulseProgram:
    """Drive channels sharing one duration and AWG sample period (times in us)."""

    channels: Tuple[DriveChannel, ...]
    total_duration: float
    sample_period: float = DEFAULT_SAMPLE_PERIOD
    virtual_z: Tuple[VirtualZ, ...] = ()

    def __post_init__(self) -> None:
        if self.total_duration < 0:
            raise ValidationError("Program duration cannot be negative")
        if self.sample_period <= 0:
            raise ValidationError("Sample period must be positive")
        ratio = self.total_duration / self.sample_period
        if abs(ratio - round(ratio)) > 1e-6:
            raise ValidationError("Sample period must divide the program duration")
        names = [ch.name for ch in self.channels]
        if len(set(names)) != len(names):
            raise ValidationError("Channel names must be unique")
        frame_qubits = [vz.qubit for vz in self.virtual_z]
        if len(set(frame_qubits)) != len(frame_qubits):
            raise ValidationError("At most one virtual-Z frame per qubit")

    @property
    def n_samples(self) -> int:
        return int(round(self.total_duration / self.sample_period))

    def sample_boundaries(self) -> np.ndarray:
        return np.arange(self.n_samples + 1, dtype=float) * self.sample_period

    def channel(self, name: str) -> DriveChannel:
        for ch in self.channels:
            if ch.name == name:
                return ch
        raise ValidationError(f"No channel named {name!r}")

    def frame(self, qubit: int) -> Optional[VirtualZ]:
        for vz in self.virtual_z:
            if vz.qubit == qubit:
                return vz
        return None

    def frame_angle(self, qubit: int, t: np.ndarray) -> np.ndarray:
        """theta_q(t); zero for qubits without a virtual-Z frame."""
        vz = self.frame(qubit)
        t = np.asarray(t, dtype=float)
        if vz is None or self.total_duration == 0:
            return np.zeros(t.shape)
        return vz.angle_at(t, self.total_duration)

    def final_frame_angles(self, n: int) -> np.ndarray:
        angles = np.zeros(n)
        for vz in self.virtual_z:
            if vz.qubit < n:
                angles[vz.qubit] = vz.final_angle()
        return angles

    def addressed_qubits(self) -> List[int]:
        qubits = {ch.target for ch in self.channels} | {ch.carrier_qubit for ch in self.channels}
        return sorted(qubits | {vz.qubit for vz in self.virtual_z})

    def replace_channel(self, name: str, **changes: Any) -> "PulseProgram":
        channels = tuple(replace(ch, **changes) if ch.name == name else ch for ch in self.channels)
        if all(ch.name != name for ch in self.channels):
            raise ValidationError(f"No channel named {name!r}")
        return replace(self, channels=channels)

    def with_duration(self, total_duration: float) -> "PulseProgram":
        return replace(self, total_duration=total_duration)

    def with_virtual_z(self, frames: Sequence[VirtualZ]) -> "PulseProgram":
        return replace(self, virtual_z=tuple(frames))

    def __str__(self) -> str:
        lines = [f"PulseProgram(T={self.total_duration:.4f} us, {len(self.channels)} channels)"]
        lines.extend(f"  {ch}" for ch in self.channels)
        return "\n".join(lines)
