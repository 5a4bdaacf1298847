"""Slow Brownian drift of device parameters and drive-line phases."""

import logging
import zlib
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..errors import ValidationError
from ..models.device import TWO_PI, QubitModel

logger = logging.getLogger(__name__)

KHZ_TO_ANGULAR = TWO_PI * 1e-3


@dataclass(frozen=True)
class DriftState:
    """Accumulated offsets at one tick."""

    frequency_offsets: Tuple[float, ...]
    coupling_offsets: Tuple[float, ...]
    phase_offsets: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class DriftProcess:
    """
    Gaussian random walk over qubit frequencies, couplings and line phases.

    Steps are standard deviations per tick: frequencies and couplings in
    rad/us, phases in rad. Tick k draws the device offsets from the stream
    (seed, k) and each line phase from a stream keyed by the line name, so
    a line follows the same path whatever other channels are present.
    """

    frequency_step: float = 0.0
    coupling_step: float = 0.0
    phase_step: float = 0.0
    tick_duration: float = 60.0
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.frequency_step, self.coupling_step, self.phase_step) < 0:
            raise ValidationError("Drift step sizes must be non-negative")
        if self.tick_duration <= 0:
            raise ValidationError("Tick duration must be positive")

    @classmethod
    def from_khz(
        cls,
        frequency_khz: float,
        coupling_khz: float = 0.0,
        phase_rad: float = 0.0,
        tick_duration: float = 60.0,
        seed: int = 0,
    ) -> "DriftProcess":
        return cls(
            frequency_step=frequency_khz * KHZ_TO_ANGULAR,
            coupling_step=coupling_khz * KHZ_TO_ANGULAR,
            phase_step=phase_rad,
            tick_duration=tick_duration,
            seed=seed,
        )

    @property
    def is_frozen(self) -> bool:
        return self.frequency_step == 0 and self.coupling_step == 0 and self.phase_step == 0

    def _device_increment(self, tick: int, n_qubits: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(tick, 0)))
        n_couplings = max(n_qubits - 1, 0)
        draws = rng.standard_normal(n_qubits + n_couplings)
        steps = np.concatenate([np.full(n_qubits, self.frequency_step), np.full(n_couplings, self.coupling_step)])
        return draws * steps

    def _line_increment(self, tick: int, name: str) -> float:
        # Keyed by line name: a channel's path does not depend on its neighbours.
        key = (tick, 1, zlib.crc32(name.encode("utf-8")))
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))
        return float(rng.standard_normal()) * self.phase_step

    def path(self, ticks: int, n_qubits: int, channels: Sequence[str] = ()) -> List[DriftState]:
        """States at ticks 0..ticks."""
        if ticks < 0:
            raise ValidationError("ticks must be non-negative")
        names = sorted(set(channels))
        total = np.zeros(n_qubits + max(n_qubits - 1, 0) + len(names))
        states = [self._state(total, n_qubits, names)]
        for tick in range(ticks):
            if not self.is_frozen:
                lines = [self._line_increment(tick, name) for name in names]
                total = total + np.concatenate([self._device_increment(tick, n_qubits), lines])
            states.append(self._state(total, n_qubits, names))
        return states

    def offsets(self, ticks: int, n_qubits: int, channels: Sequence[str] = ()) -> DriftState:
        return self.path(ticks, n_qubits, channels)[-1]

    @staticmethod
    def _state(total: np.ndarray, n_qubits: int, names: Sequence[str]) -> DriftState:
        n_couplings = max(n_qubits - 1, 0)
        return DriftState(
            frequency_offsets=tuple(float(v) for v in total[:n_qubits]),
            coupling_offsets=tuple(float(v) for v in total[n_qubits : n_qubits + n_couplings]),
            phase_offsets={
                name: float(v) for name, v in zip(names, total[n_qubits + n_couplings :])
            },
        )


def drift_step(
    model: QubitModel, drift: DriftProcess, ticks: int, channels: Sequence[str] = ()
) -> Tuple[QubitModel, Dict[str, float]]:
    """
    Device parameters after ``ticks`` of drift.

    Returns:
        (perturbed QubitModel, accumulated line-phase offsets per channel)
    """
    state = drift.offsets(ticks, model.n, channels)
    if ticks:
        logger.debug(
            "Drift after %d ticks: frequency offsets %s rad/us",
            ticks,
            ", ".join(f"{v:+.2e}" for v in state.frequency_offsets),
        )
    if ticks == 0 or drift.is_frozen:
        return model, state.phase_offsets
    return model.perturbed(state.frequency_offsets, state.coupling_offsets), state.phase_offsets
