"""Dense linear-algebra primitives for n-qubit operators and propagators."""

from .core import (
    PauliString,
    closest_unitary,
    cumulative_propagators,
    embed_operator,
    expm,
    is_density_matrix,
    is_hermitian,
    is_unitary,
    kron,
    kron_all,
    pauli_basis,
    pauli_exponential,
    pauli_operator,
    product_ket,
    product_state,
    propagate_piecewise,
    propagate_segments,
)

__all__ = [
    "PauliString",
    "closest_unitary",
    "cumulative_propagators",
    "embed_operator",
    "expm",
    "is_density_matrix",
    "is_hermitian",
    "is_unitary",
    "kron",
    "kron_all",
    "pauli_basis",
    "pauli_exponential",
    "pauli_operator",
    "product_ket",
    "product_state",
    "propagate_piecewise",
    "propagate_segments",
]
