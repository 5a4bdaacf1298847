"""Zero-fidelity: importance-sampled fidelity estimation from SIC inputs and Pauli observables."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from ..errors import ValidationError
from ..models.process import ZeroFidelityPlan, ZeroFidelitySample
from ..quantum.core import is_unitary, pauli_basis
from .tomography import ChannelOracle, pauli_stack, sic_preparations

logger = logging.getLogger(__name__)

WEIGHTINGS = ("squared", "absolute")
SUPPORT_TOLERANCE = 1e-12


def ideal_table(u: np.ndarray) -> Tuple[List[Tuple[int, ...]], np.ndarray]:
    """
    Ideal values tr[U rho_i U^dag W_j] over every SIC preparation and observable.

    Returns:
        (preparation index tuples, array of shape (4^n, 4^n))
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, atol=1e-8):
        raise ValidationError("Zero-fidelity target must be unitary")
    d = u.shape[0]
    n = int(round(math.log2(d)))
    preparations = sic_preparations(n)
    rotated = np.array([u @ rho @ u.conj().T for _, rho in preparations])
    values = np.real(np.einsum("aij,bji->ab", rotated, pauli_stack(n))) / math.sqrt(d)
    return [indices for indices, _ in preparations], values


def build_plan(u: np.ndarray, l: int, seed: int, weighting: str = "squared") -> ZeroFidelityPlan:
    """
    Draw l (preparation, observable) pairs for a unitary target.

    Args:
        u: Target unitary
        l: Number of pairs
        seed: Seed of the drawing stream
        weighting: "squared" (ideal^2 / d^2) or "absolute" (|ideal| / sum)

    Returns:
        ZeroFidelityPlan with the normalization constant recorded
    """
    if l < 1:
        raise ValidationError("Zero-fidelity sample count must be at least 1")
    if weighting not in WEIGHTINGS:
        raise ValidationError(f"Unknown weighting '{weighting}'")
    preparations, ideal = ideal_table(u)
    flat = ideal.ravel()
    support = np.flatnonzero(np.abs(flat) > SUPPORT_TOLERANCE)
    weights = flat[support] ** 2 if weighting == "squared" else np.abs(flat[support])
    normalization = float(np.sum(weights))
    probabilities = weights / normalization

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    draws = rng.choice(len(support), size=l, p=probabilities)
    n_obs = ideal.shape[1]
    samples = []
    for draw in draws:
        row, col = divmod(int(support[draw]), n_obs)
        samples.append(
            ZeroFidelitySample(
                preparation=preparations[row],
                observable=col,
                ideal=float(flat[support[draw]]),
                probability=float(probabilities[draw]),
            )
        )
    logger.debug("Built %s zero-fidelity plan with %d samples over %d pairs", weighting, l, len(support))
    return ZeroFidelityPlan(
        target=np.asarray(u, dtype=complex),
        samples=tuple(samples),
        seed=seed,
        weighting=weighting,
        normalization=normalization,
    )


def zero_fidelity_exact(u: np.ndarray, oracle: ChannelOracle) -> float:
    """F0 = (1/d^2) sum_ij tr[U rho_i U^dag W_j] tr[Gamma(rho_i) W_j] by exhaustive summation."""
    preparations, ideal = ideal_table(u)
    n = len(preparations[0])
    d = 2**n
    rhos = [rho for _, rho in sic_preparations(n)]
    basis = pauli_basis(n)
    total = 0.0
    for row, rho in enumerate(rhos):
        for col, observable in enumerate(basis):
            if abs(ideal[row, col]) <= SUPPORT_TOLERANCE:
                continue
            total += ideal[row, col] * oracle.expectation(rho, observable) / math.sqrt(d)
    return total / d**2


def estimator_values(
    plan: ZeroFidelityPlan, oracle: ChannelOracle, shots: Optional[int] = None
) -> np.ndarray:
    """
    Per-sample estimator values X(i, j).

    X = (actual / ideal) * ideal^2 / (d^2 Pr), which is exactly actual / ideal
    for the squared weighting.
    """
    n = plan.n
    if oracle.n != n:
        raise ValidationError("Oracle and plan act on different qubit counts")
    d = 2**n
    preparations = dict(sic_preparations(n))
    basis = pauli_basis(n)
    values = np.empty(plan.size)
    for k, sample in enumerate(plan.samples):
        if sample.observable == 0:
            actual = 1.0 / math.sqrt(d)
        else:
            rho = preparations[sample.preparation]
            actual = oracle.expectation(rho, basis[sample.observable], shots) / math.sqrt(d)
        weight = sample.ideal**2 / (d * d * sample.probability)
        values[k] = actual / sample.ideal * weight
    return values


def zero_fidelity_estimate(
    plan: ZeroFidelityPlan, oracle: ChannelOracle, shots: Optional[int] = None
) -> Tuple[float, float]:
    """
    Monte-Carlo estimate of F0 from a plan.

    Returns:
        (mean of X, sample standard deviation / sqrt(l))
    """
    values = estimator_values(plan, oracle, shots)
    stderr = float(np.std(values, ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    return float(np.mean(values)), stderr
