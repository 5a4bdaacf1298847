"""Frame bookkeeping shared by the qubit-tier and transmon-tier propagators."""

import logging
import math
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import LeakageError, ValidationError
from ..models.pulse import DriveChannel, PulseProgram
from ..quantum.core import cumulative_propagators, propagate_segments

logger = logging.getLogger(__name__)

LEAKAGE_THRESHOLD = 0.05


def z_signs(n: int) -> np.ndarray:
    """(2^n, n) array of Z eigenvalues, qubit 1 as the most significant bit."""
    bits = (np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 1 - 2 * bits


class PulseSimulator(ABC):
    """
    Propagates a PulseProgram and reports computational-subspace unitaries.

    Generators are sampled in a frame rotating at each qubit's drive carrier,
    so flat pulses give piecewise-constant dynamics. Reported propagators are
    in the frame rotating at the dressed qubit frequencies, with virtual-Z
    frame rotations applied.
    """

    def __init__(self, n_qubits: int, max_phase_step: float = 0.1) -> None:
        if max_phase_step <= 0:
            raise ValidationError("max_phase_step must be positive")
        self.n_qubits = n_qubits
        self.max_phase_step = max_phase_step
        self._z = z_signs(n_qubits)

    @property
    @abstractmethod
    def qubit_frequencies(self) -> np.ndarray:
        """Dressed qubit frequencies in rad/us."""

    @abstractmethod
    def _stack(
        self, prog: PulseProgram, times: np.ndarray, nu: np.ndarray, secular: bool = False
    ) -> np.ndarray:
        """Drive-frame generators at ``times``, shape (len(times), dim, dim)."""

    @abstractmethod
    def _beat_rate(self, prog: PulseProgram, nu: np.ndarray) -> float:
        """Fastest residual oscillation frequency in the drive frame."""

    @abstractmethod
    def _norm_bound(self, prog: PulseProgram, nu: np.ndarray) -> float:
        """Upper bound on the drive-frame generator norm."""

    @abstractmethod
    def _computational(self, u_full: np.ndarray) -> Tuple[np.ndarray, float]:
        """Restrict a propagator to the qubit subspace; returns (unitary, leakage)."""

    @abstractmethod
    def _computational_generator(self, h_full: np.ndarray) -> np.ndarray:
        """Effective qubit-subspace generator of a static drive-frame generator."""

    def carrier(self, channel: DriveChannel) -> float:
        self._check_channel(channel)
        return float(self.qubit_frequencies[channel.carrier_qubit] + channel.detuning)

    def _check_channel(self, channel: DriveChannel) -> None:
        if not 0 <= channel.target < self.n_qubits:
            raise ValidationError(f"Channel {channel.name} targets missing qubit {channel.target}")
        if not 0 <= channel.carrier_qubit < self.n_qubits:
            raise ValidationError(
                f"Channel {channel.name} uses carrier of missing qubit {channel.carrier_qubit}"
            )

    def drive_frame(self, prog: PulseProgram) -> np.ndarray:
        """Per-qubit frame frequency: the common carrier of the channels driving it."""
        nu = np.array(self.qubit_frequencies, dtype=float)
        for q in range(self.n_qubits):
            carriers = {self.carrier(ch) for ch in prog.channels if ch.target == q}
            if len(carriers) == 1:
                nu[q] = carriers.pop()
        return nu

    def frame_detunings(self, nu: np.ndarray) -> np.ndarray:
        return np.asarray(self.qubit_frequencies) - nu

    @staticmethod
    def held_times(prog: PulseProgram, t: np.ndarray) -> np.ndarray:
        """Centre of the AWG sample containing each time."""
        t = np.asarray(t, dtype=float)
        index = np.clip(np.floor(t / prog.sample_period), 0, max(prog.n_samples - 1, 0))
        return (index + 0.5) * prog.sample_period

    def step_boundaries(
        self, prog: PulseProgram, nu: np.ndarray, extra_times: Sequence[float] = ()
    ) -> np.ndarray:
        boundaries = prog.sample_boundaries()
        rate = self._beat_rate(prog, nu)
        if rate > 0 and prog.n_samples > 0:
            dt_max = self.max_phase_step / max(rate, self._norm_bound(prog, nu))
            substeps = max(1, int(math.ceil(prog.sample_period / dt_max)))
            if substeps > 1:
                logger.debug("Splitting each sample into %d steps", substeps)
                step = prog.sample_period / substeps
                boundaries = np.arange(prog.n_samples * substeps + 1, dtype=float) * step
                boundaries[-1] = prog.total_duration
        if len(extra_times):
            boundaries = np.union1d(boundaries, np.asarray(extra_times, dtype=float))
        return boundaries

    def to_qubit_frame(
        self, u: np.ndarray, prog: PulseProgram, nu: np.ndarray, t: float
    ) -> np.ndarray:
        """Move a drive-frame propagator at time t into the dressed qubit frame."""
        detuning_phase = self.frame_detunings(nu) * t
        frame_angles = np.array([float(prog.frame_angle(q, t)) for q in range(self.n_qubits)])
        phases = self._z @ ((detuning_phase - frame_angles) / 2.0)
        return np.exp(1j * phases)[:, None] * u

    def propagate_with_leakage(self, prog: PulseProgram) -> Tuple[np.ndarray, float]:
        for channel in prog.channels:
            self._check_channel(channel)
        nu = self.drive_frame(prog)
        boundaries = self.step_boundaries(prog, nu)
        if len(boundaries) < 2:
            u_full = np.eye(self.dimension, dtype=complex)
        else:
            midpoints = 0.5 * (boundaries[1:] + boundaries[:-1])
            u_full = propagate_segments(self._stack(prog, midpoints, nu), np.diff(boundaries))
        u, leakage = self._computational(u_full)
        return self.to_qubit_frame(u, prog, nu, prog.total_duration), leakage

    def propagate(self, prog: PulseProgram) -> np.ndarray:
        """
        Computational-subspace propagator of a full program.

        Raises:
            LeakageError: If more than 5% of the population leaves the qubit subspace
        """
        u, leakage = self.propagate_with_leakage(prog)
        if leakage > LEAKAGE_THRESHOLD:
            raise LeakageError(f"Leakage {leakage:.4f} exceeds {LEAKAGE_THRESHOLD}")
        if leakage > 0.5 * LEAKAGE_THRESHOLD:
            logger.warning("Leakage %.4f approaching threshold", leakage)
        return u

    def propagate_series(
        self, prog: PulseProgram, times: Sequence[float], frame: str = "qubit"
    ) -> List[np.ndarray]:
        """Propagators at each requested time in [0, T], in the qubit or drive frame."""
        times = np.asarray(times, dtype=float)
        if np.any(times < 0) or np.any(times > prog.total_duration + 1e-12):
            raise ValidationError("Series times must lie inside the program")
        nu = self.drive_frame(prog)
        boundaries = self.step_boundaries(prog, nu, extra_times=times)
        midpoints = 0.5 * (boundaries[1:] + boundaries[:-1])
        stack = (
            self._stack(prog, midpoints, nu)
            if len(midpoints)
            else np.zeros((0, self.dimension, self.dimension), dtype=complex)
        )
        checkpoints = np.searchsorted(boundaries, times)
        fulls = cumulative_propagators(stack, np.diff(boundaries), checkpoints)
        series = []
        for t, u_full in zip(times, fulls):
            u, _ = self._computational(u_full)
            series.append(u if frame == "drive" else self.to_qubit_frame(u, prog, nu, float(t)))
        return series

    def drive_frame_generator(self, prog: PulseProgram, t: Optional[float] = None) -> np.ndarray:
        """Secular qubit-subspace generator in the drive frame at time t (default mid-pulse)."""
        for channel in prog.channels:
            self._check_channel(channel)
        nu = self.drive_frame(prog)
        when = 0.5 * prog.total_duration if t is None else t
        h_full = self._stack(prog, np.array([when]), nu, secular=True)[0]
        return self._computational_generator(h_full)

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Dimension of the simulated Hilbert space."""
