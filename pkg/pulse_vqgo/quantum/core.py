"""Pauli algebra, tensor products and piecewise-constant propagators."""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from ..errors import ValidationError

logger = logging.getLogger(__name__)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Aliases accepted for the identity label.
_IDENTITY_ALIASES = {"1": "I", "𝟙": "I", "i": "I"}

_SINGLE_QUBIT_KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
    "r": np.array([1, 1j], dtype=complex) / math.sqrt(2),
    "l": np.array([1, -1j], dtype=complex) / math.sqrt(2),
}

HERMITIAN_TOLERANCE = 1e-12
UNITARY_TOLERANCE = 1e-10


def _normalize_label(label: str) -> str:
    label = _IDENTITY_ALIASES.get(label, label).upper()
    if label not in PAULI_MATRICES:
        raise ValidationError(f"Unknown Pauli label: {label!r}")
    return label


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Pauli labels, leftmost label acting on qubit 1."""

    labels: Tuple[str, ...]

    @classmethod
    def from_string(cls, text: str) -> "PauliString":
        """Create a PauliString from text such as ``"ZX"`` or ``"1Y1"``."""
        if not text:
            raise ValidationError("Pauli string cannot be empty")
        return cls(tuple(_normalize_label(ch) for ch in text))

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return sum(1 for label in self.labels if label != "I")

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(q for q, label in enumerate(self.labels) if label != "I")

    def operator(self) -> np.ndarray:
        """Materialize the 2^n x 2^n matrix."""
        return kron_all(*(PAULI_MATRICES[label] for label in self.labels))

    def __str__(self) -> str:
        return "".join(self.labels)


def pauli_basis(n: int) -> List[PauliString]:
    """
    Ordered n-qubit Pauli basis.

    Args:
        n: Number of qubits, at least 1

    Returns:
        The 4^n strings in lexicographic I < X < Y < Z order, identity first
    """
    if n < 1:
        raise ValidationError("Qubit count must be at least 1")
    return [PauliString(labels) for labels in itertools.product("IXYZ", repeat=n)]


def pauli_operator(labels: Union[str, PauliString]) -> np.ndarray:
    """Matrix of a Pauli string given as text or PauliString."""
    if isinstance(labels, str):
        labels = PauliString.from_string(labels)
    return labels.operator()


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, ``a`` acting on the leading factor."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(*ops: np.ndarray) -> np.ndarray:
    if not ops:
        raise ValidationError("kron_all needs at least one operator")
    return reduce(kron, ops)


def embed_operator(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Place a single-site operator on ``qubit`` of an n-site register of equal local dimension."""
    local_dim = op.shape[0]
    if not 0 <= qubit < n:
        raise ValidationError(f"Qubit index {qubit} outside register of size {n}")
    factors = [np.eye(local_dim, dtype=complex)] * n
    factors[qubit] = op
    return kron_all(*factors)


def product_ket(labels: str) -> np.ndarray:
    """State vector of a product state such as ``"+0"`` or ``"+++"``."""
    try:
        kets = [_SINGLE_QUBIT_KETS[ch] for ch in labels]
    except KeyError as e:
        raise ValidationError(f"Unknown single-qubit state label: {e}")
    return kron_all(*kets)


def product_state(labels: str) -> np.ndarray:
    """Density matrix of a product state."""
    psi = product_ket(labels)
    return np.outer(psi, psi.conj())


def is_hermitian(m: np.ndarray, atol: float = HERMITIAN_TOLERANCE) -> bool:
    """Entrywise Hermiticity check, tolerance scaled by the largest entry."""
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        return False
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    return bool(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2)))) <= atol * scale)


def is_unitary(u: np.ndarray, atol: float = UNITARY_TOLERANCE) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= atol)


def is_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> bool:
    """Unit trace, Hermitian and positive semidefinite to within -1e-9."""
    rho = np.asarray(rho)
    if not is_hermitian(rho, atol=atol):
        return False
    if abs(np.trace(rho) - 1.0) > atol:
        return False
    return bool(np.min(np.linalg.eigvalsh(rho)) >= -1e-9)


def expm(h: np.ndarray, t: float) -> np.ndarray:
    """
    exp(-i h t) for a Hermitian generator.

    Args:
        h: Hermitian matrix
        t: Duration in the units of 1/||h||

    Returns:
        Unitary propagator
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValidationError("Generator must be Hermitian")
    energies, vectors = scipy.linalg.eigh(h)
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def propagate_segments(
    hamiltonians: Union[np.ndarray, Sequence[np.ndarray]], durations: Sequence[float]
) -> np.ndarray:
    """
    Time-ordered product of exp(-i H_k tau_k) over piecewise-constant segments.

    Consecutive bit-identical generators are merged into a single exponential.
    """
    stack = np.asarray(hamiltonians, dtype=complex)
    taus = np.asarray(durations, dtype=float)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValidationError("Expected a stack of square generators")
    if stack.shape[0] != taus.shape[0]:
        raise ValidationError("One duration is required per generator")
    if np.any(taus < 0):
        raise ValidationError("Segment durations must be non-negative")
    dim = stack.shape[1]
    if stack.shape[0] == 0:
        return np.eye(dim, dtype=complex)
    if not is_hermitian(stack):
        raise ValidationError("Generators must be Hermitian")

    changed = np.ones(stack.shape[0], dtype=bool)
    changed[1:] = np.any(stack[1:] != stack[:-1], axis=(1, 2))
    starts = np.flatnonzero(changed)
    merged = stack[starts]
    merged_taus = np.add.reduceat(taus, starts)
    logger.debug("Propagating %d segments as %d exponentials", len(taus), len(starts))

    energies, vectors = np.linalg.eigh(merged)
    phases = np.exp(-1j * energies * merged_taus[:, None])
    steps = np.einsum("kij,kj,klj->kil", vectors, phases, vectors.conj())

    u = np.eye(dim, dtype=complex)
    for step in steps:
        u = step @ u
    return u


def propagate_piecewise(
    h_of_t: Callable[[float], np.ndarray], t0: float, t1: float, dt: float
) -> np.ndarray:
    """
    Midpoint-sampled piecewise-constant propagator from t0 to t1.

    Args:
        h_of_t: Hermitian generator as a function of time
        t0: Start time
        t1: End time, not earlier than t0
        dt: Step length; the final step is shortened to land on t1

    Returns:
        Unitary propagator U(t1, t0)
    """
    if dt <= 0:
        raise ValidationError("Time step must be positive")
    if t1 < t0:
        raise ValidationError("End time must not precede start time")
    boundaries = time_grid(t0, t1, dt)
    if len(boundaries) < 2:
        dim = np.asarray(h_of_t(t0)).shape[0]
        return np.eye(dim, dtype=complex)
    midpoints = 0.5 * (boundaries[1:] + boundaries[:-1])
    stack = np.array([h_of_t(float(t)) for t in midpoints], dtype=complex)
    return propagate_segments(stack, np.diff(boundaries))


def time_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    """Step boundaries from t0 to t1 with spacing dt and a shortened last step."""
    if t1 == t0:
        return np.array([t0])
    n_steps = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
    boundaries = t0 + dt * np.arange(n_steps + 1, dtype=float)
    boundaries[-1] = t1
    return boundaries


def closest_unitary(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nearest unitary in Frobenius norm by polar decomposition.

    Returns:
        Tuple of (unitary, singular values of m)
    """
    w, s, vh = np.linalg.svd(np.asarray(m, dtype=complex))
    return w @ vh, s


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    """Real part of tr[rho op]."""
    return float(np.real(np.trace(rho @ op)))


def cumulative_propagators(
    hamiltonians: np.ndarray, durations: Sequence[float], checkpoints: Sequence[int]
) -> List[np.ndarray]:
    """
    Propagators after each segment index listed in ``checkpoints``.

    A checkpoint k returns the product of the first k segment exponentials,
    so checkpoint 0 is the identity.
    """
    stack = np.asarray(hamiltonians, dtype=complex)
    taus = np.asarray(durations, dtype=float)
    dim = stack.shape[1]
    wanted = sorted(set(int(k) for k in checkpoints))
    wanted_set = set(wanted)
    if wanted and (wanted[0] < 0 or wanted[-1] > len(taus)):
        raise ValidationError("Checkpoint outside the segment range")
    if len(taus) and not is_hermitian(stack):
        raise ValidationError("Generators must be Hermitian")
    results = {}
    u = np.eye(dim, dtype=complex)
    if 0 in wanted_set:
        results[0] = u.copy()
    if len(taus):
        energies, vectors = np.linalg.eigh(stack)
        phases = np.exp(-1j * energies * taus[:, None])
        steps = np.einsum("kij,kj,klj->kil", vectors, phases, vectors.conj())
        for k, step in enumerate(steps, start=1):
            u = step @ u
            if k in wanted_set:
                results[k] = u.copy()
    return [results[int(k)] for k in checkpoints]


def pauli_exponential(label: Union[str, PauliString], theta: float) -> np.ndarray:
    """exp(i theta P) = cos(theta) 1 + i sin(theta) P."""
    op = pauli_operator(label)
    return math.cos(theta) * np.eye(op.shape[0], dtype=complex) + 1j * math.sin(theta) * op
