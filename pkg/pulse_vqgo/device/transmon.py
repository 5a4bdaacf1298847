"""Full transmon tier: anharmonic oscillators with charge coupling, truncated in the dressed basis."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from ..errors import ValidationError
from ..models.device import DeviceModel, QubitModel
from ..models.pulse import PulseProgram
from ..quantum.core import closest_unitary, embed_operator, pauli_basis
from .blockdiag import least_action_block_diagonalize
from .simulator import PulseSimulator, z_signs

logger = logging.getLogger(__name__)

# Terms rotating faster than this fraction of the carrier are dropped.
RWA_CUTOFF_FRACTION = 0.5


@dataclass(frozen=True, eq=False)
class TransmonLevels:
    """Lowest eigenstates of one transmon: energies relative to the ground state and charge operator."""

    energies: np.ndarray
    y_op: np.ndarray

    @property
    def omega01(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def anharmonicity(self) -> float:
        if len(self.energies) < 3:
            return 0.0
        return float(self.energies[2] - 2 * self.energies[1] + self.energies[0])

    @property
    def charge_element(self) -> float:
        """|<0|y|1>|, the scale of a resonant drive on the qubit transition."""
        return float(abs(self.y_op[0, 1]))


def transmon_spectrum(omega_h: float, epsilon: float, levels: int, fock_dim: int = 40) -> TransmonLevels:
    """
    Diagonalize H_Q = (w_h/4)[y^2 - (2/eps) cos(sqrt(eps) x)] in a Fock basis.

    Args:
        omega_h: Harmonic frequency in rad/us
        epsilon: Dimensionless anharmonicity parameter
        levels: Number of eigenstates to keep
        fock_dim: Oscillator basis size

    Returns:
        TransmonLevels with the kept energies and the charge operator y
    """
    if levels > fock_dim:
        raise ValidationError("Cannot keep more levels than the Fock basis holds")
    lowering = np.diag(np.sqrt(np.arange(1, fock_dim, dtype=float)), 1)
    x = lowering + lowering.T
    y = -1j * (lowering - lowering.T)
    x_eigs, x_vecs = np.linalg.eigh(x)
    cos_x = (x_vecs * np.cos(math.sqrt(epsilon) * x_eigs)) @ x_vecs.T
    h = (omega_h / 4.0) * (np.real(y @ y) - (2.0 / epsilon) * cos_x)
    energies, vectors = np.linalg.eigh(0.5 * (h + h.T))
    # Fix eigenvector signs so <k|x|k+1> is positive.
    for k in range(1, levels):
        if vectors[:, k - 1] @ x @ vectors[:, k] < 0:
            vectors[:, k] *= -1
    kept = vectors[:, :levels]
    y_op = kept.T @ y @ kept
    return TransmonLevels(energies=energies[:levels] - energies[0], y_op=y_op)


class TransmonChain:
    """
    Static chain H = sum H_Q_j + sum J_j y_j y_j+1 in its retained dressed eigenbasis.

    Dressed states are labelled by the bare product state they overlap most.
    Computational states are ordered in the qubit convention, in which qubit
    state |0> is the transmon's first excited level.
    """

    def __init__(self, dev: DeviceModel) -> None:
        self.dev = dev
        m, n = dev.levels_per_transmon, dev.n
        if dev.global_truncation > m**n:
            raise ValidationError(
                f"Global truncation {dev.global_truncation} exceeds {m}^{n} product states"
            )
        self.transmons = [
            transmon_spectrum(w, e, m, dev.fock_dim) for w, e in zip(dev.omega_h, dev.epsilon)
        ]
        bare = sum(embed_operator(np.diag(t.energies).astype(complex), j, n) for j, t in enumerate(self.transmons))
        y_bare = [embed_operator(t.y_op, j, n) for j, t in enumerate(self.transmons)]
        h = np.asarray(bare, dtype=complex)
        for j, strength in enumerate(dev.coupling):
            h = h + strength * y_bare[j] @ y_bare[j + 1]
        energies, vectors = scipy.linalg.eigh(0.5 * (h + h.conj().T))

        bare_index, eigen_index = linear_sum_assignment(-np.abs(vectors) ** 2)
        label_of_eigen = np.empty(m**n, dtype=int)
        label_of_eigen[eigen_index] = bare_index
        kept = np.arange(dev.global_truncation)
        self.energies = energies[kept]
        self.vectors = vectors[:, kept]
        self.levels = np.array(
            [np.unravel_index(label_of_eigen[k], (m,) * n) for k in kept], dtype=int
        )
        self.y_ops = [self.vectors.conj().T @ op @ self.vectors for op in y_bare]

        position = {tuple(lv): k for k, lv in enumerate(self.levels)}
        bits = 1 - (z_signs(n) + 1) // 2
        try:
            self.computational = np.array([position[tuple(1 - b)] for b in bits], dtype=int)
        except KeyError:
            raise ValidationError("Global truncation drops computational states")
        comp_energies = self.energies[self.computational]
        self.qubit_frequencies = 2.0 * (z_signs(n).T @ comp_energies) / 2**n
        logger.debug("Dressed qubit frequencies (rad/us): %s", self.qubit_frequencies)

    @property
    def dimension(self) -> int:
        return len(self.energies)

    def excitations(self) -> np.ndarray:
        """(dimension, n) excitation numbers of the dressed states."""
        return self.levels

    def static_qubit_hamiltonian(self) -> Dict[str, float]:
        """Pauli coefficients of the dressed computational energies, qubit convention."""
        comp_energies = np.diag(self.energies[self.computational]).astype(complex)
        d = 2**self.dev.n
        return {
            str(p): float(np.real(np.trace(p.operator() @ comp_energies)) / d)
            for p in pauli_basis(self.dev.n)
            if set(str(p)) <= {"I", "Z"}
        }

    def reduced_qubit_model(self) -> Tuple[QubitModel, Tuple[float, ...]]:
        """
        Two-level reduction of the chain.

        Returns:
            Tuple of (QubitModel with bare 0-1 frequencies and J g_j g_j+1 couplings,
            per-qubit drive scales g_j = |<0|y_j|1>|)
        """
        scales = tuple(t.charge_element for t in self.transmons)
        couplings = tuple(
            strength * scales[j] * scales[j + 1] for j, strength in enumerate(self.dev.coupling)
        )
        model = QubitModel(
            n=self.dev.n,
            qubit_freq=tuple(t.omega01 for t in self.transmons),
            coupling=couplings,
        )
        return model, scales


class TransmonSimulator(PulseSimulator):
    """
    Driven transmon chain in the frame F_a = sum_q n_q(a) nu_q of the dressed basis.

    A channel contributes Omega(t) sin(w_c t - phi_A) y_target with the
    lab-frame phase phi_A = pi - phi, which makes a resonant drive with
    phase phi act like the qubit tier's (Omega g / 2)(cos phi X + sin phi Y).
    """

    def __init__(self, dev: DeviceModel, max_phase_step: float = 0.1) -> None:
        super().__init__(dev.n, max_phase_step)
        self.dev = dev
        self.chain = TransmonChain(dev)

    @property
    def qubit_frequencies(self) -> np.ndarray:
        return self.chain.qubit_frequencies

    @property
    def dimension(self) -> int:
        return self.chain.dimension

    def _frame_energies(self, nu: np.ndarray) -> np.ndarray:
        return self.chain.levels @ nu

    def _channel_groups(
        self, prog: PulseProgram, nu: np.ndarray, secular: bool
    ) -> List[Tuple[int, float, np.ndarray]]:
        """(channel index, frequency, co-rotating operator) groups kept under the RWA."""
        frame = self._frame_energies(nu)
        gaps = frame[:, None] - frame[None, :]
        groups = []
        for index, ch in enumerate(prog.channels):
            if ch.amplitude == 0:
                continue
            carrier = self.carrier(ch)
            detuned = gaps + carrier
            y = self.chain.y_ops[ch.target]
            keep = (np.abs(detuned) < RWA_CUTOFF_FRACTION * abs(carrier)) & (np.abs(y) > 1e-12)
            if not np.any(keep):
                continue
            scale = max(abs(carrier), 1.0)
            rounded = np.round(detuned / (1e-9 * scale)) * (1e-9 * scale)
            for freq in np.unique(rounded[keep]):
                mask = keep & (rounded == freq)
                value = 0.0 if abs(freq) < 1e-6 * scale else float(freq)
                if secular and value != 0.0:
                    continue
                groups.append((index, value, np.where(mask, y, 0.0)))
        return groups

    def _stack(
        self, prog: PulseProgram, times: np.ndarray, nu: np.ndarray, secular: bool = False
    ) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        static = np.diag(self.chain.energies - self._frame_energies(nu)).astype(complex)
        stack = np.broadcast_to(static, (len(times),) + static.shape).copy()
        held = self.held_times(prog, times)
        drives = {}
        for index, freq, op in self._channel_groups(prog, nu, secular):
            ch = prog.channels[index]
            if index not in drives:
                envelope = ch.complex_envelope(held, prog.total_duration, prog.sample_period)
                theta = prog.frame_angle(ch.carrier_qubit, held)
                drives[index] = 0.5 * ch.amplitude * envelope * np.exp(1j * (ch.phase + 0.5 * math.pi - theta))
            coefficient = drives[index] * np.exp(1j * freq * times)
            term = np.einsum("t,ij->tij", coefficient, op)
            stack += term + np.conj(np.swapaxes(term, 1, 2))
        return stack

    def _beat_rate(self, prog: PulseProgram, nu: np.ndarray) -> float:
        freqs = [abs(freq) for _, freq, _ in self._channel_groups(prog, nu, secular=False)]
        return float(max(freqs, default=0.0))

    def _norm_bound(self, prog: PulseProgram, nu: np.ndarray) -> float:
        static = float(np.max(np.abs(self.chain.energies - self._frame_energies(nu))))
        drive = sum(ch.amplitude * float(np.max(np.abs(self.chain.y_ops[ch.target]))) for ch in prog.channels)
        return static + drive

    def _computational(self, u_full: np.ndarray) -> Tuple[np.ndarray, float]:
        idx = self.chain.computational
        block = u_full[np.ix_(idx, idx)]
        unitary, singular_values = closest_unitary(block)
        leakage = float(max(0.0, 1.0 - np.min(singular_values) ** 2))
        return unitary, leakage

    def _computational_generator(self, h_full: np.ndarray) -> np.ndarray:
        labels = np.ones(self.dimension, dtype=int)
        labels[self.chain.computational] = 0
        h_bd, _ = least_action_block_diagonalize(h_full, labels)
        idx = self.chain.computational
        return h_bd[np.ix_(idx, idx)]

    def lab_hamiltonian(self, prog: PulseProgram, t: float) -> np.ndarray:
        """Lab-frame generator in the retained dressed basis at time t."""
        h = np.diag(self.chain.energies).astype(complex)
        held = self.held_times(prog, np.array([t]))
        for ch in prog.channels:
            self._check_channel(ch)
            envelope = ch.complex_envelope(held, prog.total_duration, prog.sample_period)[0]
            theta = float(prog.frame_angle(ch.carrier_qubit, held)[0])
            field_value = ch.amplitude * np.real(
                envelope * np.exp(1j * (self.carrier(ch) * t + ch.phase + 0.5 * math.pi - theta))
            )
            h = h + field_value * self.chain.y_ops[ch.target]
        return h


def build_lab_hamiltonian(dev: DeviceModel, prog: PulseProgram, t: float) -> np.ndarray:
    """
    Lab-frame transmon-chain Hamiltonian at time t.

    Raises:
        ValidationError: If t lies outside the program or the truncation exceeds m^n
    """
    if t < 0 or t > prog.total_duration:
        raise ValidationError("Time outside the pulse program")
    return TransmonSimulator(dev).lab_hamiltonian(prog, t)


def qubit_subspace_unitary(dev: DeviceModel, prog: PulseProgram) -> np.ndarray:
    """
    Computational-subspace propagator of the full transmon model.

    The projected block is replaced by its closest unitary, moved into the
    frame rotating at the dressed qubit frequencies and relabelled in the
    qubit convention.

    Raises:
        LeakageError: If leakage = 1 - min singular value^2 exceeds 0.05
    """
    return TransmonSimulator(dev).propagate(prog)


def truncation_sweep(
    dev: DeviceModel, prog: PulseProgram, levels: Sequence[int] = (2, 3, 4)
) -> List[Dict[str, float]]:
    """
    Leakage and distance to the largest truncation for each level count.

    Returns:
        One record per level count with keys levels, leakage and distance
    """
    results = []
    unitaries = []
    for m in levels:
        u, leakage = TransmonSimulator(dev.with_levels(m)).propagate_with_leakage(prog)
        unitaries.append(u)
        results.append({"levels": float(m), "leakage": leakage})
    reference = unitaries[-1]
    for record, u in zip(results, unitaries):
        overlap = abs(np.trace(reference.conj().T @ u)) / reference.shape[0]
        record["distance"] = float(1.0 - overlap)
    return results
