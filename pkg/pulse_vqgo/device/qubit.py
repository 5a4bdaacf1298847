"""Two-level qubit tier: YY-coupled qubits under microwave drives."""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..models.device import QubitModel
from ..models.pulse import PulseProgram
from ..quantum.core import PAULI_MATRICES, embed_operator, propagate_piecewise
from .simulator import PulseSimulator, z_signs

logger = logging.getLogger(__name__)

SIGMA = np.array([[0, 1], [0, 0]], dtype=complex)


def dressed_qubit_frequencies(model: QubitModel) -> np.ndarray:
    """
    Qubit frequencies including the static dispersive shifts of the couplings.

    The exchange Hamiltonian is diagonalized, each eigenstate is matched to its
    closest computational state and the energies are projected onto Z_q.
    """
    n = model.n
    d = 2**n
    h = np.zeros((d, d), dtype=complex)
    for q, omega in enumerate(model.qubit_freq):
        h += 0.5 * omega * embed_operator(PAULI_MATRICES["Z"], q, n)
    for j, strength in enumerate(model.coupling):
        flip = embed_operator(SIGMA, j, n) @ embed_operator(SIGMA.conj().T, j + 1, n)
        h += strength * (flip + flip.conj().T)
    energies, vectors = np.linalg.eigh(h)
    rows, cols = linear_sum_assignment(-np.abs(vectors) ** 2)
    state_energy = np.empty(d)
    state_energy[rows] = energies[cols]
    return 2.0 * (z_signs(n).T @ state_energy) / d


class QubitSimulator(PulseSimulator):
    """
    Rotating-wave qubit model H = sum (w_q/2) Z_q + sum J Y_q Y_q+1 + drives.

    In a frame rotating at nu_q the drive of a channel on qubit q reads
    (Omega/2)(Re c X_q + Im c Y_q) with
    c = (d^X - i d^Y) exp(i((w_c - nu_q) t + phi - theta(t))).
    """

    def __init__(self, model: QubitModel, max_phase_step: float = 0.1) -> None:
        super().__init__(model.n, max_phase_step)
        self.model = model
        model.dispersive_ratio()
        n = model.n
        self._x = [embed_operator(PAULI_MATRICES["X"], q, n) for q in range(n)]
        self._y = [embed_operator(PAULI_MATRICES["Y"], q, n) for q in range(n)]
        self._zops = [embed_operator(PAULI_MATRICES["Z"], q, n) for q in range(n)]
        self._flip = [
            embed_operator(SIGMA, j, n) @ embed_operator(SIGMA.conj().T, j + 1, n)
            for j in range(n - 1)
        ]
        self._dressed = dressed_qubit_frequencies(model)

    @property
    def qubit_frequencies(self) -> np.ndarray:
        return self._dressed

    @property
    def dimension(self) -> int:
        return 2**self.n_qubits

    def _frame_terms(
        self, prog: PulseProgram, nu: np.ndarray, secular: bool
    ) -> Tuple[np.ndarray, List[Tuple[float, complex, np.ndarray]]]:
        """Static diagonal part plus (frequency, weight, operator) coupling terms."""
        static = sum(
            0.5 * (omega - f) * z for omega, f, z in zip(self.model.qubit_freq, nu, self._zops)
        )
        terms = []
        for j, strength in enumerate(self.model.coupling):
            beat = float(nu[j] - nu[j + 1])
            if strength == 0 or (secular and beat != 0.0):
                continue
            terms.append((beat, complex(strength), self._flip[j]))
        return np.asarray(static, dtype=complex), terms

    def _stack(
        self, prog: PulseProgram, times: np.ndarray, nu: np.ndarray, secular: bool = False
    ) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        static, couplings = self._frame_terms(prog, nu, secular)
        coefficients = []
        operators = []
        for beat, strength, flip in couplings:
            phase = strength * np.exp(1j * beat * times)
            coefficients.extend([phase, np.conj(phase)])
            operators.extend([flip, flip.conj().T])
        held = self.held_times(prog, times)
        for ch in prog.channels:
            if ch.amplitude == 0:
                continue
            offset = self.carrier(ch) - nu[ch.target]
            if secular and offset != 0.0:
                continue
            envelope = ch.complex_envelope(held, prog.total_duration, prog.sample_period)
            theta = prog.frame_angle(ch.carrier_qubit, held)
            c = ch.amplitude * envelope * np.exp(1j * (offset * times + ch.phase - theta))
            coefficients.extend([0.5 * c.real, 0.5 * c.imag])
            operators.extend([self._x[ch.target], self._y[ch.target]])
        stack = np.broadcast_to(static, (len(times),) + static.shape).copy()
        if operators:
            stack += np.einsum("kt,kij->tij", np.asarray(coefficients), np.asarray(operators))
        return stack

    def _beat_rate(self, prog: PulseProgram, nu: np.ndarray) -> float:
        rates = [0.0]
        for j, strength in enumerate(self.model.coupling):
            if strength != 0:
                rates.append(abs(nu[j] - nu[j + 1]))
        for ch in prog.channels:
            if ch.amplitude != 0:
                rates.append(abs(self.carrier(ch) - nu[ch.target]))
        return float(max(rates))

    def _norm_bound(self, prog: PulseProgram, nu: np.ndarray) -> float:
        detuning = 0.5 * np.sum(np.abs(np.asarray(self.model.qubit_freq) - nu))
        return float(
            detuning
            + np.sum(np.abs(self.model.coupling))
            + sum(ch.amplitude for ch in prog.channels)
        )

    def _computational(self, u_full: np.ndarray) -> Tuple[np.ndarray, float]:
        return u_full, 0.0

    def _computational_generator(self, h_full: np.ndarray) -> np.ndarray:
        return h_full

    def hamiltonian(
        self,
        prog: PulseProgram,
        t: float,
        frame: str = "rotating",
        frame_frequencies: Optional[np.ndarray] = None,
        coupling_rwa: bool = True,
    ) -> np.ndarray:
        """
        Generator at a single time.

        Args:
            prog: Pulse program
            t: Time in us
            frame: ``"lab"`` or ``"rotating"``
            frame_frequencies: Rotating-frame frequencies, default the bare qubit frequencies
            coupling_rwa: Keep only the exchange part of the YY coupling in the rotating frame

        Returns:
            Hermitian matrix of dimension 2^n
        """
        if frame not in ("lab", "rotating"):
            raise ValueError(f"Unknown frame: {frame}")
        for channel in prog.channels:
            self._check_channel(channel)
        if frame == "lab":
            return self._lab_hamiltonian(prog, t)
        nu = (
            np.asarray(self.model.qubit_freq, dtype=float)
            if frame_frequencies is None
            else np.asarray(frame_frequencies, dtype=float)
        )
        h = self._stack(prog, np.array([t]), nu)[0]
        if not coupling_rwa:
            # Swap the exchange form for the full rotated YY product.
            for j, strength in enumerate(self.model.coupling):
                beat = nu[j] - nu[j + 1]
                flip = self._flip[j]
                h -= strength * (np.exp(1j * beat * t) * flip + np.exp(-1j * beat * t) * flip.conj().T)
                h += strength * self._rotated_y(j, nu[j], t) @ self._rotated_y(j + 1, nu[j + 1], t)
        return h

    def _rotated_y(self, q: int, freq: float, t: float) -> np.ndarray:
        lowering = embed_operator(SIGMA, q, self.n_qubits)
        rotated = lowering * np.exp(1j * freq * t)
        return -1j * (rotated - rotated.conj().T)

    def _lab_hamiltonian(self, prog: PulseProgram, t: float) -> np.ndarray:
        h = sum(0.5 * omega * z for omega, z in zip(self.model.qubit_freq, self._zops))
        h = np.asarray(h, dtype=complex)
        for j, strength in enumerate(self.model.coupling):
            h = h + strength * self._y[j] @ self._y[j + 1]
        held = float(self.held_times(prog, np.array([t]))[0])
        for ch in prog.channels:
            envelope = ch.complex_envelope(np.array([held]), prog.total_duration, prog.sample_period)[0]
            theta = float(prog.frame_angle(ch.carrier_qubit, held))
            field_value = ch.amplitude * np.real(
                envelope * np.exp(1j * (self.carrier(ch) * t + ch.phase - theta))
            )
            h = h + field_value * self._x[ch.target]
        return h

    def propagate_lab(self, prog: PulseProgram, dt: Optional[float] = None) -> np.ndarray:
        """Lab-frame propagator without any rotating-wave approximation."""
        if dt is None:
            fastest = max(
                [abs(w) for w in self.model.qubit_freq] + [self.carrier(ch) for ch in prog.channels]
            )
            dt = min(prog.sample_period, self.max_phase_step / fastest)
        return propagate_piecewise(lambda t: self._lab_hamiltonian(prog, t), 0.0, prog.total_duration, dt)

    def lab_to_rotating(self, u_lab: np.ndarray, t: float, frequencies: np.ndarray) -> np.ndarray:
        """exp(i sum w_q t Z_q / 2) u_lab."""
        phases = self._z @ (np.asarray(frequencies, dtype=float) * t / 2.0)
        return np.exp(1j * phases)[:, None] * u_lab


def build_qubit_hamiltonian(
    model: QubitModel, prog: PulseProgram, t: float, frame: str = "rotating"
) -> np.ndarray:
    """Qubit-tier generator at time t in the lab or rotating frame."""
    return QubitSimulator(model).hamiltonian(prog, t, frame=frame)
