"""Figures of merit evaluated on simulated gates."""

import math
from typing import Callable, Optional, Tuple

import numpy as np

from ..analysis.tomography import (
    UnitaryOracle,
    chi_from_unitary,
    process_fidelity,
    process_tomography,
    reduced_chi_from_unitary,
    reduced_overlap,
    reduced_overlap_stderr,
    reduced_process_tomography,
)
from ..analysis.zero_fidelity import zero_fidelity_estimate
from ..errors import ConfigurationError
from ..models.process import ProcessMatrix, ZeroFidelityPlan
from ..models.scenario import Scenario
from ..noise.readout import ReadoutModel, SampledOracle


def unitary_fidelity(u: np.ndarray, target: np.ndarray) -> float:
    """Process fidelity |tr[target^dag u]|^2 / d^2 of two unitaries."""
    d = target.shape[0]
    return float(abs(np.trace(target.conj().T @ u)) ** 2 / d**2)


class GateEvaluator:
    """
    Maps a simulated unitary to the scenario's figure of merit.

    ``exact`` ignores readout and returns the process fidelity; the other
    two measure through a SampledOracle seeded per iteration.
    """

    def __init__(
        self,
        scenario: Scenario,
        readout: ReadoutModel,
        seed_for: Callable[[int], int],
        plan: Optional[ZeroFidelityPlan] = None,
        zero_fidelity_shots: int = 0,
    ) -> None:
        self.scenario = scenario
        self.readout = readout
        self.seed_for = seed_for
        self.plan = plan
        self.zero_fidelity_shots = zero_fidelity_shots
        if scenario.figure_of_merit == "zero-fidelity" and plan is None:
            raise ConfigurationError("zero-fidelity figure of merit needs a sampling plan")
        self._reduced_target = (
            reduced_chi_from_unitary(scenario.target) if scenario.figure_of_merit == "reduced-chi" else None
        )

    @property
    def noise_free(self) -> bool:
        fom = self.scenario.figure_of_merit
        return fom == "exact" or (fom == "reduced-chi" and not self.scenario.shots and self.readout.is_ideal)

    def oracle(self, u: np.ndarray, iteration: int) -> SampledOracle:
        return SampledOracle(UnitaryOracle(u), self.readout, self.seed_for(iteration))

    def __call__(self, u: np.ndarray, iteration: int) -> Tuple[float, float]:
        fom = self.scenario.figure_of_merit
        if fom == "exact":
            return unitary_fidelity(u, self.scenario.target), 0.0
        oracle = self.oracle(u, iteration)
        if fom == "reduced-chi":
            shots = self.scenario.shots or None
            value = reduced_overlap(reduced_process_tomography(oracle, shots), self._reduced_target)
            return value, (reduced_overlap_stderr(oracle, self._reduced_target, shots) if shots else 0.0)
        return zero_fidelity_estimate(self.plan, oracle, self.zero_fidelity_shots or None)


def final_tomography(
    u: np.ndarray, target: np.ndarray, readout: ReadoutModel, seed: int, shots: int = 0
) -> Tuple[ProcessMatrix, float]:
    """Full process tomography of a gate through readout and its fidelity to the target."""
    n = int(round(math.log2(u.shape[0])))
    oracle = SampledOracle(UnitaryOracle(u), readout, seed)
    chi = process_tomography(oracle, n, shots or None)
    return chi, process_fidelity(chi, chi_from_unitary(target))
