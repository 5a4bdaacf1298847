"""Process matrices, channel oracles and linear-inversion tomography."""

import itertools
import logging
import math
from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigurationError, ValidationError
from ..models.process import REDUCED_LABELS, ProcessMatrix, ReducedChi, normalize_label
from ..quantum.core import PauliString, is_unitary, kron_all, pauli_basis, product_state

logger = logging.getLogger(__name__)

SIC_POLAR = math.acos(-1.0 / 3.0)

# Observables acting on the control qubit alone; reduced tomography does not count them.
CONTROL_ONLY_OBSERVABLES = ("XI", "YI", "ZI")


def sic_states() -> List[np.ndarray]:
    """The tetrahedral SIC set: |0> and three states at polar angle arccos(-1/3)."""
    states = [np.array([1.0, 0.0], dtype=complex)]
    for azimuth in (0.0, 2 * math.pi / 3, 4 * math.pi / 3):
        states.append(
            np.array(
                [math.cos(SIC_POLAR / 2), np.exp(1j * azimuth) * math.sin(SIC_POLAR / 2)],
                dtype=complex,
            )
        )
    return [np.outer(psi, psi.conj()) for psi in states]


def sic_preparations(n: int) -> List[Tuple[Tuple[int, ...], np.ndarray]]:
    """All 4^n product SIC inputs as (index tuple, density matrix)."""
    singles = sic_states()
    return [
        (indices, kron_all(*(singles[i] for i in indices)))
        for indices in itertools.product(range(4), repeat=n)
    ]


def pauli_stack(n: int) -> np.ndarray:
    return np.array([p.operator() for p in pauli_basis(n)])


class ChannelOracle(ABC):
    """Evaluates tr[Gamma(rho) P] for an n-qubit channel Gamma."""

    n: int

    @abstractmethod
    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Output state Gamma(rho)."""

    def expectation(
        self, rho: np.ndarray, observable: PauliString, shots: Optional[int] = None
    ) -> float:
        """Exact expectation; noiseless oracles ignore the shot budget."""
        return float(np.real(np.trace(self.apply(rho) @ observable.operator())))


class UnitaryOracle(ChannelOracle):
    """Noiseless unitary channel."""

    def __init__(self, u: np.ndarray) -> None:
        u = np.asarray(u, dtype=complex)
        if not is_unitary(u, atol=1e-8):
            raise ValidationError("Oracle requires a unitary")
        self.u = u
        self.n = int(round(math.log2(u.shape[0])))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return self.u @ rho @ self.u.conj().T


class KrausOracle(ChannelOracle):
    """Noiseless channel given by Kraus operators."""

    def __init__(self, kraus: Sequence[np.ndarray]) -> None:
        if not kraus:
            raise ValidationError("At least one Kraus operator is required")
        self.kraus = [np.asarray(k, dtype=complex) for k in kraus]
        total = sum(k.conj().T @ k for k in self.kraus)
        if np.max(np.abs(total - np.eye(total.shape[0]))) > 1e-8:
            raise ValidationError("Kraus operators are not trace preserving")
        self.n = int(round(math.log2(self.kraus[0].shape[0])))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)


def chi_from_unitary(u: np.ndarray) -> ProcessMatrix:
    """
    Rank-one process matrix chi_ij = u_i u_j^* of a unitary.

    Args:
        u: Unitary of dimension 2^n

    Returns:
        ProcessMatrix with u_i = tr[sigma_i u] / d
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, atol=1e-8):
        raise ValidationError("chi_from_unitary requires a unitary")
    d = u.shape[0]
    n = int(round(math.log2(d)))
    paulis = pauli_stack(n)
    coefficients = np.einsum("kij,ji->k", paulis, u) / d
    return ProcessMatrix(n=n, chi=np.outer(coefficients, coefficients.conj()))


def chi_from_transfer_matrix(transfer: np.ndarray, n: int) -> ProcessMatrix:
    """
    Convert a Pauli transfer matrix R_PQ = tr[P Gamma(Q)] / d into chi.

    The Choi matrix sum_ab |a><b| (x) Gamma(|a><b|) is assembled and read
    out in the column-stacked Pauli basis.
    """
    d = 2**n
    paulis = pauli_stack(n)
    images = np.einsum("pq,qba,pij->abij", transfer, paulis, paulis) / d
    choi = images.transpose(0, 2, 1, 3).reshape(d * d, d * d)
    vectors = paulis.transpose(0, 2, 1).reshape(len(paulis), d * d).T
    chi = vectors.conj().T @ choi @ vectors / d**2
    return ProcessMatrix(n=n, chi=0.5 * (chi + chi.conj().T))


def process_tomography_settings(n: int) -> List[Tuple[Tuple[int, ...], str]]:
    """(SIC preparation, Pauli observable) pairs measured by full tomography."""
    observables = [str(p) for p in pauli_basis(n)[1:]]
    return [(indices, obs) for indices, _ in sic_preparations(n) for obs in observables]


def process_tomography(oracle: ChannelOracle, n: int, shots: Optional[int] = None) -> ProcessMatrix:
    """
    Linear-inversion process tomography from SIC inputs and Pauli observables.

    Args:
        oracle: Channel oracle, noiseless or sampled
        n: Qubit count
        shots: Shots per setting, None for exact expectations

    Returns:
        Reconstructed ProcessMatrix

    Raises:
        ConfigurationError: If the preparation design is singular
    """
    basis = pauli_basis(n)
    paulis = pauli_stack(n)
    preparations = sic_preparations(n)
    inputs = np.array(
        [[np.real(np.trace(rho @ p)) for rho in (r for _, r in preparations)] for p in paulis]
    )
    outputs = np.empty_like(inputs)
    for column, (_, rho) in enumerate(preparations):
        outputs[0, column] = 1.0
        for row, observable in enumerate(basis[1:], start=1):
            outputs[row, column] = oracle.expectation(rho, observable, shots)
    condition = np.linalg.cond(inputs)
    if not np.isfinite(condition) or condition > 1e10:
        raise ConfigurationError("Tomography design matrix is singular")
    transfer = np.linalg.solve(inputs.T, outputs.T).T
    logger.debug("Process tomography used %d settings", len(preparations) * (len(basis) - 1))
    return chi_from_transfer_matrix(transfer, n)


def state_tomography(
    oracle: ChannelOracle, rho_in: np.ndarray, n: int, shots: Optional[int] = None
) -> np.ndarray:
    """Linear-inversion estimate of Gamma(rho_in) from the 4^n - 1 Pauli expectations."""
    d = 2**n
    rho = np.eye(d, dtype=complex) / d
    for observable in pauli_basis(n)[1:]:
        rho = rho + oracle.expectation(rho_in, observable, shots) * observable.operator() / d
    return rho


def reduced_basis() -> np.ndarray:
    """Columns |+0>, |-0>, |+1>, |-1>."""
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    minus = np.array([1, -1], dtype=complex) / math.sqrt(2)
    zero = np.array([1, 0], dtype=complex)
    one = np.array([0, 1], dtype=complex)
    return np.stack([np.kron(plus, zero), np.kron(minus, zero), np.kron(plus, one), np.kron(minus, one)], axis=1)


def reduced_counted_observables() -> List[str]:
    """The 12 expectation values the reduced protocol is charged for."""
    return [str(p) for p in pauli_basis(2)[1:] if str(p) not in CONTROL_ONLY_OBSERVABLES]


def reduced_process_tomography(oracle: ChannelOracle, shots: Optional[int] = None) -> ReducedChi:
    """
    Reduced process matrix of a two-qubit channel from the single input |+0>.

    The output state's matrix elements in the {|+0>, |-0>, |+1>, |-1>} basis
    equal chi restricted to {II, ZI, IX, ZX} when the channel lies in that span.
    """
    rho = state_tomography(oracle, product_state("+0"), 2, shots)
    basis = reduced_basis()
    return ReducedChi(matrix=basis.conj().T @ rho @ basis)


def reduced_chi_from_unitary(u: np.ndarray) -> ReducedChi:
    """Reduced target built from the {II, ZI, IX, ZX} block of chi_from_unitary."""
    chi = chi_from_unitary(u)
    if chi.n != 2:
        raise ValidationError("Reduced chi is defined for two qubits")
    idx = [chi.index(label) for label in REDUCED_LABELS]
    return ReducedChi(matrix=chi.chi[np.ix_(idx, idx)])


def reduced_overlap(r: ReducedChi, target: ReducedChi) -> float:
    """Re tr[r target^dag]."""
    return float(np.real(np.trace(r.matrix @ target.matrix.conj().T)))


def reduced_overlap_stderr(oracle: ChannelOracle, target: ReducedChi, shots: int) -> float:
    """
    Binomial standard error of the shot-sampled reduced overlap.

    The overlap is linear in the Pauli expectations of the output state,
    Re tr[rho M] with M = B target^dag B^dag, so each observable contributes
    weight^2 (1 - <P>^2) / shots with <P> the oracle's exact mean.
    """
    if shots < 1:
        raise ValidationError("shots must be at least 1")
    rho_in = product_state("+0")
    basis = reduced_basis()
    m = basis @ target.matrix.conj().T @ basis.conj().T
    variance = 0.0
    for observable in pauli_basis(2)[1:]:
        weight = float(np.real(np.trace(observable.operator() @ m))) / 4
        if abs(weight) < 1e-15:
            continue
        mean = oracle.expectation(rho_in, observable, None)
        variance += weight**2 * max(0.0, 1.0 - mean**2) / shots
    return math.sqrt(variance)


def process_fidelity(a: ProcessMatrix, b: ProcessMatrix) -> float:
    """Re tr[a b^dag]; the process fidelity when b is a unitary target."""
    if a.n != b.n:
        raise ValidationError("Process matrices act on different qubit counts")
    return float(np.real(np.trace(a.chi @ b.chi.conj().T)))


def mutual_overlap(a: ProcessMatrix, b: ProcessMatrix) -> float:
    """tr[a b^dag] normalized by the purities of both matrices."""
    if a.n != b.n:
        raise ValidationError("Process matrices act on different qubit counts")
    norm = math.sqrt(
        float(np.real(np.trace(a.chi @ a.chi.conj().T))) * float(np.real(np.trace(b.chi @ b.chi.conj().T)))
    )
    return process_fidelity(a, b) / norm if norm > 0 else 0.0


def generable_mask(n: int, generators: Sequence[str]) -> np.ndarray:
    """Boolean mask of chi elements indexed by the identity and the given Pauli strings."""
    allowed = {"I" * n} | {normalize_label(g) for g in generators}
    in_set = np.array([str(p) in allowed for p in pauli_basis(n)])
    return np.outer(in_set, in_set)


def dominant_elements(chi: ProcessMatrix, k: int) -> List[Tuple[str, str, complex]]:
    """The k largest |chi_ij| as (row label, column label, value)."""
    labels = chi.labels
    order = np.argsort(-np.abs(chi.chi), axis=None, kind="stable")[:k]
    rows, cols = np.unravel_index(order, chi.chi.shape)
    return [(labels[r], labels[c], complex(chi.chi[r, c])) for r, c in zip(rows, cols)]


def drop_largest(chi: ProcessMatrix, k: int, rescale: bool = False) -> ProcessMatrix:
    """
    chi with its k largest-magnitude elements zeroed, exposing the small error terms.

    With ``rescale`` the remainder is divided by its largest magnitude.
    """
    remaining = chi.chi.copy()
    order = np.argsort(-np.abs(remaining), axis=None, kind="stable")[:k]
    remaining[np.unravel_index(order, remaining.shape)] = 0.0
    peak = float(np.max(np.abs(remaining)))
    if rescale and peak > 0:
        remaining = remaining / peak
    return ProcessMatrix(n=chi.n, chi=remaining)


def largest_outside(chi: ProcessMatrix, mask: np.ndarray) -> float:
    """Largest |chi_ij| outside a boolean mask."""
    outside = np.where(mask, 0.0, np.abs(chi.chi))
    return float(np.max(outside))


def chi_summary(chi: ProcessMatrix, k: int = 4) -> Dict[str, float]:
    return {f"{row},{col}": abs(value) for row, col, value in dominant_elements(chi, k)}
