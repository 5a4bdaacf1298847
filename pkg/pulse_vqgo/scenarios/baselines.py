"""Tomography-only experiments: identity baselines and the reduced-chi scatter."""

import logging
import math
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.stats import pearsonr

from ..analysis.tomography import (
    UnitaryOracle,
    chi_from_unitary,
    process_fidelity,
    process_tomography,
    reduced_chi_from_unitary,
    reduced_overlap,
    reduced_process_tomography,
)
from ..noise.readout import (
    ReadoutModel,
    SampledOracle,
    calibrate_readout_to_baseline,
    identity_fidelity_under_readout,
)
from ..quantum.core import pauli_exponential
from .context import RunContext
from .gates import zx_target

logger = logging.getLogger(__name__)

DEFAULT_BASELINE = 0.95
SCATTER_CHANNELS = 100
SCATTER_SHOTS = 10_000


def run_identity_baseline(ctx: RunContext) -> None:
    """
    Calibrate symmetric readout error to the two-qubit identity baseline and
    report the identity fidelity it implies for two and three qubits.
    """
    config = ctx.config
    target = config.identity_baseline or DEFAULT_BASELINE
    readout2 = calibrate_readout_to_baseline(target, 2)
    p = readout2.p01[0] if readout2.p01 else 0.0
    shots = config.tomography_shots or None
    fidelities = {}
    for n in (2, 3):
        readout = ReadoutModel.symmetric(p, n)
        identity = np.eye(2**n, dtype=complex)
        chi = process_tomography(SampledOracle(UnitaryOracle(identity), readout, ctx.task_seed(6, n)), n, shots)
        ctx.write_chi(f"identity-{n}.chi.txt", chi)
        fidelities[n] = process_fidelity(chi, chi_from_unitary(identity))
        logger.info("Identity fidelity under readout p=%.5f, n=%d: %.4f", p, n, fidelities[n])
    ctx.result.fidelity = fidelities[3]
    ctx.result.metrics.update(
        {
            "readout_p": p,
            "baseline_target": target,
            "identity_fidelity_2q": fidelities[2],
            "identity_fidelity_3q": fidelities[3],
            "closed_form_3q": identity_fidelity_under_readout(p, 3),
        }
    )


def random_commuting_unitary(rng: np.random.Generator) -> Tuple[np.ndarray, Tuple[float, float, float]]:
    """exp(i(a ZX + b ZI + c IX)) with angles uniform in [-pi/2, pi/2]."""
    a, b, c = rng.uniform(-math.pi / 2, math.pi / 2, size=3)
    u = pauli_exponential("ZX", a) @ pauli_exponential("ZI", b) @ pauli_exponential("IX", c)
    return u, (float(a), float(b), float(c))


def run_reduced_scatter(ctx: RunContext, count: int = SCATTER_CHANNELS) -> None:
    """
    Reduced-chi overlap against full process fidelity for random channels in
    the {II, ZI, IX, ZX} span, noiseless and through readout with shots.
    """
    config = ctx.config
    readout = config.readout_model(2)
    shots = config.tomography_shots or SCATTER_SHOTS
    rng = np.random.default_rng(np.random.SeedSequence(ctx.task_seed(7)))
    reduced_target = reduced_chi_from_unitary(zx_target())
    full_target = chi_from_unitary(zx_target())
    rows = []
    for k in range(count):
        u, (a, b, c) = random_commuting_unitary(rng)
        exact = UnitaryOracle(u)
        noisy = SampledOracle(exact, readout, ctx.task_seed(8, k))
        rows.append(
            {
                "zx_angle": a,
                "zi_angle": b,
                "ix_angle": c,
                "process_fidelity": process_fidelity(chi_from_unitary(u), full_target),
                "reduced_noiseless": reduced_overlap(reduced_process_tomography(exact), reduced_target),
                "reduced_noisy": reduced_overlap(reduced_process_tomography(noisy, shots), reduced_target),
            }
        )
    table = pd.DataFrame(rows)
    ctx.write_table("scatter.csv", table)
    correlation = float(pearsonr(table["reduced_noisy"], table["process_fidelity"])[0]) if count > 2 else math.nan
    ctx.result.metrics.update(
        {
            "channels": count,
            "shots": shots,
            "max_noiseless_deviation": float(np.max(np.abs(table["reduced_noiseless"] - table["process_fidelity"]))),
            "mean_noisy_deviation": float(np.mean(np.abs(table["reduced_noisy"] - table["process_fidelity"]))),
            "pearson": correlation,
        }
    )
    logger.info("Reduced scatter over %d channels: Pearson %.4f", count, correlation)
