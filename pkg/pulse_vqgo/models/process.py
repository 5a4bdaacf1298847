"""Process-matrix and effective-Hamiltonian result models."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..errors import ValidationError
from ..quantum.core import PauliString, is_hermitian, pauli_basis

REDUCED_LABELS = ("II", "ZI", "IX", "ZX")


def normalize_label(label: str) -> str:
    """Canonical Pauli label text, e.g. ``"1X1"`` -> ``"IXI"``."""
    return str(PauliString.from_string(label))


@dataclass(frozen=True, eq=False)
class ProcessMatrix:
    """Pauli-basis process matrix of an n-qubit channel, indexed by pauli_basis(n)."""

    n: int
    chi: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        size = 4**self.n
        if self.chi.shape != (size, size):
            raise ValidationError(f"chi must be {size}x{size} for n={self.n}")

    @property
    def labels(self) -> List[str]:
        return [str(p) for p in pauli_basis(self.n)]

    def index(self, label: str) -> int:
        return self.labels.index(normalize_label(label))

    def element(self, row: str, col: str) -> complex:
        return complex(self.chi[self.index(row), self.index(col)])

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.chi)))

    def is_hermitian(self, atol: float = 1e-9) -> bool:
        return is_hermitian(self.chi, atol=atol)

    def max_distance(self, other: "ProcessMatrix") -> float:
        """Largest entrywise |chi_a - chi_b|."""
        if other.n != self.n:
            raise ValidationError("Process matrices act on different qubit counts")
        return float(np.max(np.abs(self.chi - other.chi)))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProcessMatrix":
        chi = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(n=int(data["n"]), chi=chi)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "re": self.chi.real.tolist(), "im": self.chi.imag.tolist()}

    def __str__(self) -> str:
        return f"ProcessMatrix(n={self.n}, trace={self.trace:.4f})"


@dataclass(frozen=True, eq=False)
class ReducedChi:
    """4x4 process matrix restricted to the {II, ZI, IX, ZX} span."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.matrix.shape != (4, 4):
            raise ValidationError("Reduced chi must be 4x4")

    def element(self, row: str, col: str) -> complex:
        return complex(
            self.matrix[REDUCED_LABELS.index(normalize_label(row)), REDUCED_LABELS.index(normalize_label(col))]
        )

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def __str__(self) -> str:
        return f"ReducedChi(trace={self.trace:.4f})"


@dataclass(frozen=True)
class EffectiveRates:
    """
    Pauli coefficients (rad/us) of an effective qubit-frame Hamiltonian.

    ``coefficients`` holds the requested operator set, leftmost label on the
    control qubit; ``all_coefficients`` keeps every Pauli string of the
    simulated register.
    """

    coefficients: Dict[str, float]
    residual: float
    qubits: Tuple[int, ...] = ()
    all_coefficients: Dict[str, float] = field(default_factory=dict)

    def __getitem__(self, label: str) -> float:
        key = normalize_label(label)
        if key in self.coefficients:
            return self.coefficients[key]
        raise KeyError(label)

    def get(self, label: str, default: float = 0.0) -> float:
        key = normalize_label(label)
        return self.coefficients.get(key, self.all_coefficients.get(key, default))

    @property
    def global_phase_rate(self) -> float:
        """The identity coefficient; excluded from fidelity reasoning."""
        identity = "I" * len(next(iter(self.coefficients), "I"))
        return self.coefficients.get(identity, 0.0)

    def as_mhz(self) -> Dict[str, float]:
        return {label: value / (2 * math.pi) for label, value in self.coefficients.items()}

    def dominant(self, exclude_identity: bool = True) -> Optional[str]:
        items = [
            (abs(v), k) for k, v in self.coefficients.items() if not (exclude_identity and set(k) == {"I"})
        ]
        return max(items)[1] if items else None

    def __str__(self) -> str:
        parts = ", ".join(f"{k}={v:+.4f}" for k, v in self.as_mhz().items())
        return f"EffectiveRates[MHz]({parts}; residual={self.residual:.2e})"


@dataclass(frozen=True)
class ZeroFidelitySample:
    """One drawn (SIC preparation, Pauli observable) pair."""

    preparation: Tuple[int, ...]
    observable: int
    ideal: float
    probability: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "preparation": list(self.preparation),
            "observable": self.observable,
            "ideal": self.ideal,
            "probability": self.probability,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ZeroFidelitySample":
        return cls(
            preparation=tuple(int(i) for i in data["preparation"]),
            observable=int(data["observable"]),
            ideal=float(data["ideal"]),
            probability=float(data["probability"]),
        )


@dataclass(frozen=True, eq=False)
class ZeroFidelityPlan:
    """
    Importance-sampled (preparation, observable) pairs for a unitary target.

    Ideal values use the orthonormal observables W_j = sigma_j / sqrt(d).
    ``normalization`` is the constant the sampling weights were divided by.
    """

    target: np.ndarray = field(repr=False)
    samples: Tuple[ZeroFidelitySample, ...]
    seed: int
    weighting: str = "squared"
    normalization: float = 1.0

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValidationError("A zero-fidelity plan needs at least one sample")
        if any(abs(s.ideal) <= 0 for s in self.samples):
            raise ValidationError("Plan contains a zero-ideal pair")

    @property
    def n(self) -> int:
        return int(round(math.log2(self.target.shape[0])))

    @property
    def size(self) -> int:
        return len(self.samples)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": {"re": self.target.real.tolist(), "im": self.target.imag.tolist()},
            "seed": self.seed,
            "l": self.size,
            "weighting": self.weighting,
            "normalization": self.normalization,
            "samples": [s.to_dict() for s in self.samples],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ZeroFidelityPlan":
        target = np.asarray(data["target"]["re"], dtype=float) + 1j * np.asarray(
            data["target"]["im"], dtype=float
        )
        return cls(
            target=target,
            samples=tuple(ZeroFidelitySample.from_dict(s) for s in data["samples"]),
            seed=int(data["seed"]),
            weighting=data.get("weighting", "squared"),
            normalization=float(data.get("normalization", 1.0)),
        )
