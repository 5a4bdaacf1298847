"""Physical parameter models of the transmon chain."""

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from ..errors import ValidationError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Coupling-to-detuning ratio above which the dispersive qubit picture is suspect.
DISPERSIVE_RATIO_LIMIT = 0.1


def mhz_to_angular(values: Sequence[float]) -> Tuple[float, ...]:
    """Convert MHz to angular frequency in rad/us."""
    return tuple(TWO_PI * float(v) for v in values)


def angular_to_mhz(values: Sequence[float]) -> Tuple[float, ...]:
    return tuple(float(v) / TWO_PI for v in values)


@dataclass(frozen=True)
class DeviceModel:
    """
    Full anharmonic description of an n-transmon chain.

    Frequencies are angular, in rad/us. Transmon j couples to transmon j+1
    through coupling[j].
    """

    n: int
    omega_h: Tuple[float, ...]
    epsilon: Tuple[float, ...]
    coupling: Tuple[float, ...]
    levels_per_transmon: int = 4
    global_truncation: int = 64
    fock_dim: int = 40

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError("Device needs at least one transmon")
        if self.levels_per_transmon < 2:
            raise ValidationError("Each transmon needs at least two levels")
        if len(self.omega_h) != self.n or len(self.epsilon) != self.n:
            raise ValidationError("omega_h and epsilon need one entry per transmon")
        if len(self.coupling) != self.n - 1:
            raise ValidationError(
                f"Expected {self.n - 1} couplings for {self.n} transmons, got {len(self.coupling)}"
            )
        if any(e <= 0 for e in self.epsilon):
            raise ValidationError("Anharmonicity parameters must be positive")
        if self.fock_dim < self.levels_per_transmon:
            raise ValidationError("Fock basis smaller than retained levels")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DeviceModel":
        """Create a DeviceModel from config data with frequencies in MHz."""
        omega_h = mhz_to_angular(data["omega_h_mhz"])
        return cls(
            n=len(omega_h),
            omega_h=omega_h,
            epsilon=tuple(float(e) for e in data["epsilon"]),
            coupling=mhz_to_angular(data.get("coupling_mhz", ())),
            levels_per_transmon=int(data.get("levels_per_transmon", 4)),
            global_truncation=int(data.get("global_truncation", 64)),
            fock_dim=int(data.get("fock_dim", 40)),
        )

    def with_levels(self, levels: int) -> "DeviceModel":
        truncation = min(self.global_truncation, levels**self.n)
        return replace(self, levels_per_transmon=levels, global_truncation=truncation)

    def __str__(self) -> str:
        freqs = ", ".join(f"{f:.1f}" for f in angular_to_mhz(self.omega_h))
        return f"DeviceModel(n={self.n}, omega_h/2pi=[{freqs}] MHz, m={self.levels_per_transmon})"


@dataclass(frozen=True)
class QubitModel:
    """Two-level reduction of the chain: qubit frequencies and YY couplings in rad/us."""

    n: int
    qubit_freq: Tuple[float, ...]
    coupling: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError("Model needs at least one qubit")
        if len(self.qubit_freq) != self.n:
            raise ValidationError("qubit_freq needs one entry per qubit")
        if len(self.coupling) != self.n - 1:
            raise ValidationError(
                f"Expected {self.n - 1} couplings for {self.n} qubits, got {len(self.coupling)}"
            )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "QubitModel":
        """Create a QubitModel from config data with frequencies in MHz."""
        freqs = mhz_to_angular(data["qubit_freq_mhz"])
        return cls(
            n=len(freqs),
            qubit_freq=freqs,
            coupling=mhz_to_angular(data.get("coupling_mhz", ())),
        )

    def dispersive_ratio(self) -> float:
        """Largest |J| / |w_i - w_j| over coupled pairs."""
        worst = 0.0
        for j, strength in enumerate(self.coupling):
            detuning = abs(self.qubit_freq[j] - self.qubit_freq[j + 1])
            if strength == 0:
                continue
            ratio = math.inf if detuning == 0 else abs(strength) / detuning
            worst = max(worst, ratio)
        if worst > DISPERSIVE_RATIO_LIMIT:
            logger.warning(
                "Coupling/detuning ratio %.3f exceeds %.1f; qubit model may be inaccurate",
                worst,
                DISPERSIVE_RATIO_LIMIT,
            )
        return worst

    def perturbed(
        self, freq_offsets: Sequence[float], coupling_offsets: Sequence[float]
    ) -> "QubitModel":
        freqs = tuple(np.asarray(self.qubit_freq) + np.asarray(freq_offsets, dtype=float))
        couplings = tuple(
            np.asarray(self.coupling, dtype=float) + np.asarray(coupling_offsets, dtype=float)
        )
        return replace(self, qubit_freq=tuple(map(float, freqs)), coupling=tuple(map(float, couplings)))

    def __str__(self) -> str:
        freqs = ", ".join(f"{f:.3f}" for f in angular_to_mhz(self.qubit_freq))
        return f"QubitModel(n={self.n}, omega/2pi=[{freqs}] MHz)"
