"""Pulse synthesis helpers: Floquet envelopes, channel builders and envelope tables."""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from ..errors import ValidationError
from ..models.pulse import (
    DEFAULT_RAMP_SAMPLES,
    DriveChannel,
    Envelope,
    PulseProgram,
)


@dataclass(frozen=True)
class FloquetDrive:
    """Omega(t) = sum_k Omega_k cos(k w t), split into a peak amplitude and a normalized envelope."""

    envelope: Envelope
    amplitude: float
    duration: float
    frequency: float

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.frequency

    def omega_of_t(self, t: np.ndarray) -> np.ndarray:
        return self.amplitude * self.envelope.evaluate(t)


def make_floquet_drive(weights: Sequence[float], omega: float, periods: int) -> FloquetDrive:
    """
    Floquet modulation for the central-qubit resonant channel.

    Args:
        weights: Fourier weights Omega_k in rad/us, k = 0, 1, 2, ...
        omega: Floquet angular frequency in rad/us
        periods: Number of Floquet periods

    Returns:
        FloquetDrive lasting periods * 2 pi / omega
    """
    if omega <= 0:
        raise ValidationError("Floquet frequency must be positive")
    if periods < 1 or int(periods) != periods:
        raise ValidationError("Periods must be a positive integer")
    if len(weights) == 0:
        raise ValidationError("At least one Fourier weight is required")
    amplitude = float(sum(abs(w) for w in weights))
    duration = periods * 2.0 * math.pi / omega
    if amplitude == 0:
        return FloquetDrive(Envelope.flat(0.0), 0.0, duration, omega)
    envelope = Envelope(
        kind="floquet", weights=tuple(float(w) / amplitude for w in weights), frequency=omega
    )
    return FloquetDrive(envelope, amplitude, duration, omega)


def cross_resonance_channel(
    name: str,
    control: int,
    target: int,
    amplitude: float,
    phase: float = 0.0,
    level: float = 1.0,
    ramp_samples: int = DEFAULT_RAMP_SAMPLES,
) -> DriveChannel:
    """Flat drive on ``control`` at the frequency of ``target``."""
    return DriveChannel(
        name=name,
        target=control,
        carrier_qubit=target,
        amplitude=amplitude,
        phase=phase,
        envelope_x=Envelope.flat(level),
        ramp_samples=ramp_samples,
    )


def resonant_channel(
    name: str,
    qubit: int,
    amplitude: float,
    phase: float = 0.0,
    level_x: float = 1.0,
    level_y: float = 0.0,
    ramp_samples: int = DEFAULT_RAMP_SAMPLES,
) -> DriveChannel:
    """Flat drive on ``qubit`` at its own frequency."""
    return DriveChannel(
        name=name,
        target=qubit,
        carrier_qubit=qubit,
        amplitude=amplitude,
        phase=phase,
        envelope_x=Envelope.flat(level_x),
        envelope_y=Envelope.flat(level_y),
        ramp_samples=ramp_samples,
    )


def floquet_channel(name: str, qubit: int, drive: FloquetDrive, phase: float = 0.0) -> DriveChannel:
    """Resonant channel carrying a Floquet envelope, without ramps."""
    return DriveChannel(
        name=name,
        target=qubit,
        carrier_qubit=qubit,
        amplitude=drive.amplitude,
        phase=phase,
        envelope_x=drive.envelope,
        ramp_samples=0,
    )


def snap_duration(duration: float, sample_period: float) -> float:
    """Round a duration to a whole number of AWG samples."""
    return round(duration / sample_period) * sample_period


def envelope_table(prog: PulseProgram) -> pd.DataFrame:
    """One row per (sample, channel): time, quadratures, amplitude and frame angle."""
    centers = (np.arange(prog.n_samples) + 0.5) * prog.sample_period
    frames = []
    for ch in prog.channels:
        envelope = ch.complex_envelope(centers, prog.total_duration, prog.sample_period)
        frames.append(
            pd.DataFrame(
                {
                    "time_us": centers,
                    "channel": ch.name,
                    "d_x": envelope.real,
                    "d_y": -envelope.imag,
                    "amplitude_mhz": ch.amplitude / (2 * math.pi),
                    "phase": ch.phase,
                    "frame_angle": prog.frame_angle(ch.carrier_qubit, centers),
                }
            )
        )
    if not frames:
        return pd.DataFrame(columns=["time_us", "channel", "d_x", "d_y", "amplitude_mhz", "phase", "frame_angle"])
    return pd.concat(frames, ignore_index=True)
