"""Projective shot sampling with per-qubit readout error."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect

from ..analysis.tomography import (
    ChannelOracle,
    UnitaryOracle,
    chi_from_unitary,
    process_fidelity,
    process_tomography,
)
from ..errors import CalibrationError, ValidationError
from ..quantum.core import PauliString

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_MEASUREMENT_ROTATIONS = {
    "I": np.eye(2, dtype=complex),
    "Z": np.eye(2, dtype=complex),
    "X": _HADAMARD,
    "Y": _HADAMARD @ np.diag([1.0, -1.0j]),
}


@dataclass(frozen=True)
class ReadoutModel:
    """Per-qubit confusion probabilities: p01 = P(read 1 | 0), p10 = P(read 0 | 1)."""

    p01: Tuple[float, ...]
    p10: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.p01) != len(self.p10):
            raise ValidationError("p01 and p10 must list the same qubits")
        for p in (*self.p01, *self.p10):
            if not 0.0 <= p < 0.5:
                raise ValidationError(f"Readout error {p} outside [0, 0.5)")

    @classmethod
    def symmetric(cls, p: float, n: int) -> "ReadoutModel":
        return cls(p01=(float(p),) * n, p10=(float(p),) * n)

    @classmethod
    def ideal(cls, n: int) -> "ReadoutModel":
        return cls.symmetric(0.0, n)

    @property
    def n(self) -> int:
        return len(self.p01)

    @property
    def is_ideal(self) -> bool:
        return not any(self.p01) and not any(self.p10)

    def flip_probabilities(self) -> np.ndarray:
        """(n, 2) array: column b holds the flip probability given true bit b."""
        return np.stack([np.asarray(self.p01), np.asarray(self.p10)], axis=1)

    def to_dict(self) -> Dict[str, Any]:
        return {"p01": list(self.p01), "p10": list(self.p10)}


def _rotated_probabilities(state: np.ndarray, observable: PauliString) -> np.ndarray:
    rotation = _MEASUREMENT_ROTATIONS[observable.labels[0]]
    for label in observable.labels[1:]:
        rotation = np.kron(rotation, _MEASUREMENT_ROTATIONS[label])
    probabilities = np.clip(np.real(np.diag(rotation @ state @ rotation.conj().T)), 0.0, None)
    return probabilities / probabilities.sum()


def _outcome_bits(n: int) -> np.ndarray:
    indices = np.arange(2**n)
    return (indices[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1


def readout_expectation(state: np.ndarray, observable: PauliString, readout: ReadoutModel) -> float:
    """Exact mean of the shot estimator: Born probabilities folded with the readout flips."""
    n = observable.n_qubits
    probabilities = _rotated_probabilities(state, observable)
    bits = _outcome_bits(n)
    flips = readout.flip_probabilities()
    factors = np.ones(len(probabilities))
    for q in observable.support:
        b = bits[:, q]
        factors *= (1 - 2 * b) * (1 - 2 * flips[q, b])
    return float(probabilities @ factors)


def sample_shots(
    state: np.ndarray,
    observable: PauliString,
    shots: int,
    readout: ReadoutModel,
    seed: SeedLike,
) -> float:
    """
    Estimate <P> from simulated projective measurements.

    Args:
        state: Density matrix
        observable: Pauli string measured in its product eigenbasis
        shots: Number of shots, at least 1
        readout: Per-qubit readout error model
        seed: Seed, SeedSequence or Generator of the shot stream

    Returns:
        Mean of the +/-1 parity over shots after readout flips
    """
    if shots < 1:
        raise ValidationError("shots must be at least 1")
    n = observable.n_qubits
    if readout.n != n:
        raise ValidationError("Readout model and observable act on different qubit counts")
    rng = np.random.default_rng(seed)
    probabilities = _rotated_probabilities(state, observable)
    outcomes = rng.choice(len(probabilities), size=shots, p=probabilities)
    bits = _outcome_bits(n)[outcomes]
    flip_p = readout.flip_probabilities()[np.arange(n)[None, :], bits]
    bits = bits ^ (rng.random(bits.shape) < flip_p)
    support = list(observable.support)
    if not support:
        return 1.0
    parity = np.sum(bits[:, support], axis=1) % 2
    return float(np.mean(1 - 2 * parity))


class SampledOracle(ChannelOracle):
    """
    Shot-sampled expectations of a noiseless oracle's output states.

    Each call draws from its own stream keyed by (seed, call index); without
    a shot budget the exact readout-attenuated mean is returned.
    """

    def __init__(self, base: ChannelOracle, readout: ReadoutModel, seed: int = 0) -> None:
        self.base = base
        self.readout = readout
        self.seed = seed
        self.n = base.n
        self._calls = 0

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return self.base.apply(rho)

    def expectation(
        self, rho: np.ndarray, observable: PauliString, shots: Optional[int] = None
    ) -> float:
        out = self.base.apply(rho)
        if shots is None:
            return readout_expectation(out, observable, self.readout)
        stream = np.random.SeedSequence(self.seed, spawn_key=(self._calls,))
        self._calls += 1
        return sample_shots(out, observable, shots, self.readout, stream)


def identity_fidelity_under_readout(p: float, n: int) -> float:
    """Process fidelity of the identity seen through symmetric readout error p: ((1 + 3(1-2p)) / 4)^n."""
    return ((1 + 3 * (1 - 2 * p)) / 4) ** n


def measured_identity_fidelity(
    readout: ReadoutModel, shots: Optional[int] = None, seed: int = 0
) -> float:
    """Identity-gate process fidelity from simulated full tomography under a readout model."""
    n = readout.n
    identity = np.eye(2**n, dtype=complex)
    oracle = SampledOracle(UnitaryOracle(identity), readout, seed)
    return process_fidelity(process_tomography(oracle, n, shots), chi_from_unitary(identity))


def calibrate_readout_to_baseline(
    target: float, n: int, tolerance: float = 0.005, max_steps: int = 50
) -> ReadoutModel:
    """
    Find the symmetric readout error that makes the identity gate's tomographic fidelity equal ``target``.

    Raises:
        CalibrationError: If the target is unreachable or the verified fidelity misses it
    """
    if not 0.5 < target <= 1.0:
        raise CalibrationError(f"Identity baseline {target} outside (0.5, 1]")
    if target == 1.0:
        return ReadoutModel.ideal(n)
    upper = 0.5 - 1e-12
    if identity_fidelity_under_readout(upper, n) > target:
        raise CalibrationError(f"Identity baseline {target} unreachable for n={n}")
    try:
        p = bisect(
            lambda x: identity_fidelity_under_readout(x, n) - target,
            0.0,
            upper,
            xtol=1e-12,
            maxiter=max_steps,
        )
    except Exception as e:
        raise CalibrationError(f"Readout bisection failed: {e}")
    readout = ReadoutModel.symmetric(p, n)
    achieved = measured_identity_fidelity(readout)
    if abs(achieved - target) > tolerance:
        raise CalibrationError(f"Calibrated readout gives {achieved:.4f}, target {target:.4f}")
    logger.info("Readout calibrated to p=%.5f (identity fidelity %.4f, n=%d)", p, achieved, n)
    return readout


def readout_from_config(p01: Sequence[float], p10: Sequence[float]) -> ReadoutModel:
    return ReadoutModel(p01=tuple(float(p) for p in p01), p10=tuple(float(p) for p in p10))
