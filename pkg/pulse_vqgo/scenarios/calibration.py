"""Calibration procedures: CR phase, amplitude pre-scan, CR rates and Omega_c."""

import logging
import math
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import bisect, brentq, minimize_scalar

from ..config import Config
from ..device.rates import conditional_rates, extract_effective_rates
from ..device.simulator import PulseSimulator
from ..errors import CalibrationError, VQGOError
from ..models.device import TWO_PI
from ..models.process import EffectiveRates
from ..models.pulse import PulseProgram
from ..models.scenario import CalibrationResult
from ..noise.distortion import LineDistortion, apply_distortion
from ..optimization.bayesopt import optimize
from ..optimization.space import SearchSpace
from ..quantum.core import product_ket
from .programs import build_simulator, three_qubit_program, zx_program

logger = logging.getLogger(__name__)

PHASE_RESIDUAL_LIMIT = 0.05
PHASE_BUDGET = 12
PHASE_REFINE_WIDTH = math.pi / 8
PRESCAN_POINTS = 16
OMEGA_C_LIMIT = TWO_PI * 5.0
RABI_MATCH_TOLERANCE = 0.01
RATE_MATCH_TOLERANCE = 0.02
MATCH_ITERATIONS = 8
BISECTION_STEPS = 50


def target_flip_population(u: np.ndarray, target: int = 1) -> float:
    """Probability of finding ``target`` in |-> after applying u to |+...+>; P(+-) + P(--) for a pair."""
    n = int(round(math.log2(u.shape[0])))
    psi = (u @ product_ket("+" * n)).reshape((2,) * n)
    minus = np.moveaxis(psi, target, 0)
    amplitude = (minus[0] - minus[1]) / math.sqrt(2)
    return float(np.sum(np.abs(amplitude) ** 2))


def calibrate_phase(
    config: Config,
    amplitude: Optional[float] = None,
    distortion: Optional[LineDistortion] = None,
    seed: int = 0,
    budget: int = PHASE_BUDGET,
    sim: Optional[PulseSimulator] = None,
    side: str = "left",
    trace_path: Optional[Path] = None,
) -> CalibrationResult:
    """
    Find the CR drive phase that cancels the ZY and IY terms on qubit 1.

    A one-dimensional BO over phi in [-pi/2, pi/2] minimizes the target's
    flip population from |++>; a bounded scalar search then polishes the
    incumbent.

    Args:
        config: Run configuration
        amplitude: CR amplitude in rad/us, default the first configured one
        distortion: Line distortion seen by the pulses, default the configured one
        seed: Optimizer seed
        budget: BO evaluations
        sim: Simulator of the pair (0, 1) or of the chain (0, 1, 2)
        side: CR channel to calibrate on a three-qubit chain, "left" or "right"
        trace_path: Optional JSON-lines file for the BO evaluations

    Returns:
        CalibrationResult with the phase and the residual flip population
    """
    sim = sim or build_simulator(config, (0, 1))
    distortion = config.distortion() if distortion is None else distortion
    if side not in ("left", "right"):
        raise CalibrationError(f"Unknown CR side '{side}'")
    index = 0 if side == "left" else 1
    amplitude = config.angular(config.cr_amplitude_mhz[index]) if amplitude is None else amplitude

    def program(phase: float) -> PulseProgram:
        if sim.n_qubits == 2:
            return zx_program(config, amplitude, cr_phase=phase)
        if side == "left":
            return three_qubit_program(config, amplitude, 0.0, left_phase=phase)
        return three_qubit_program(config, 0.0, amplitude, right_phase=phase)

    def population(phase: float) -> float:
        prog = apply_distortion(program(phase), distortion)
        return target_flip_population(sim.propagate(prog))

    space = SearchSpace.from_bounds({"phase": (-math.pi / 2, math.pi / 2, "rad")})
    trace = optimize(
        lambda x, _: -population(float(x[0])), space, budget, seed, trace_path=trace_path, noise_free=True
    )
    best = trace.best()
    if best is None:
        raise CalibrationError("Every phase evaluation failed")
    start = best.params["phase"]
    lower = max(-math.pi / 2, start - PHASE_REFINE_WIDTH)
    upper = min(math.pi / 2, start + PHASE_REFINE_WIDTH)
    result = minimize_scalar(population, bounds=(lower, upper), method="bounded", options={"xatol": 1e-6})
    phase = float(result.x) if result.fun <= -best.value else start
    residual = population(phase)
    logger.info("Calibrated CR phase %.5f rad (flip population %.3e)", phase, residual)
    return CalibrationResult(
        name=f"phase-{side}",
        values={"phase": phase, "amplitude_mhz": amplitude / TWO_PI},
        residuals={"flip_population": residual},
        threshold=PHASE_RESIDUAL_LIMIT,
    )


def prescan_cr_amplitude(
    sim: PulseSimulator,
    program_for: Callable[[float], PulseProgram],
    qubits: Sequence[int],
    label: str,
    maximum: float,
    points: int = PRESCAN_POINTS,
) -> Tuple[pd.DataFrame, float]:
    """
    Rates over evenly spaced CR amplitudes and the largest one spanning a single Rabi oscillation.

    Args:
        sim: Simulator of the register
        program_for: Builds the program for a CR amplitude in rad/us
        qubits: Qubits handed to the rate extraction
        label: Entangling Pauli term, e.g. ``"ZX"`` or ``"IXZ"``
        maximum: Largest scanned amplitude in rad/us
        points: Number of amplitudes

    Returns:
        (table with one row per amplitude, selected amplitude in rad/us)

    Raises:
        CalibrationError: If even the weakest amplitude exceeds a Rabi angle of pi/2
    """
    rows = []
    chosen = None
    for amplitude in np.linspace(maximum / points, maximum, points):
        prog = program_for(float(amplitude))
        rates = extract_effective_rates(sim, prog, qubits, span="full")
        rate = rates.get(label)
        angle = abs(rate) * prog.total_duration
        rows.append(
            {
                "amplitude_mhz": amplitude / TWO_PI,
                "rate_mhz": rate / TWO_PI,
                "rabi_angle": angle,
                **{f"{k}_mhz": v for k, v in rates.as_mhz().items() if set(k) != {"I"}},
            }
        )
        if angle <= math.pi / 2:
            chosen = float(amplitude)
    table = pd.DataFrame(rows).fillna(0.0)
    if chosen is None:
        raise CalibrationError(f"No scanned amplitude keeps the {label} Rabi angle below pi/2")
    logger.info("Pre-scan selected %s amplitude %.3f MHz", label, chosen / TWO_PI)
    return table, chosen


def calibrate_cr_amplitude(
    config: Config,
    sim: PulseSimulator,
    side: str,
    rate: float,
    phase: float = 0.0,
) -> Tuple[float, float]:
    """
    CR amplitude giving |c| = rate for ZXI (side "left") or IXZ (side "right").

    Returns:
        (amplitude in rad/us, phase with pi added when the rate came out negative)
    """
    if side not in ("left", "right"):
        raise CalibrationError(f"Unknown CR side '{side}'")
    label = "ZXI" if side == "left" else "IXZ"

    def signed_rate(amplitude: float) -> float:
        if side == "left":
            prog = three_qubit_program(config, amplitude, 0.0, left_phase=phase, ramp_samples=0)
        else:
            prog = three_qubit_program(config, 0.0, amplitude, right_phase=phase, ramp_samples=0)
        return extract_effective_rates(sim, prog, (0, 1, 2), span="full").get(label)

    lower, upper = config.angular(config.cr_max_amplitude_mhz) / 100, config.angular(config.cr_max_amplitude_mhz)
    if (abs(signed_rate(lower)) - rate) * (abs(signed_rate(upper)) - rate) > 0:
        raise CalibrationError(f"{label} rate {rate / TWO_PI:.3f} MHz not bracketed by the CR amplitude range")
    try:
        amplitude = brentq(lambda a: abs(signed_rate(a)) - rate, lower, upper, xtol=1e-9, maxiter=BISECTION_STEPS)
    except Exception as e:
        if isinstance(e, VQGOError):
            raise
        raise CalibrationError(f"{label} amplitude search failed: {e}")
    if signed_rate(amplitude) < 0:
        phase = phase + math.pi
    logger.debug("%s amplitude %.4f MHz at phase %.4f", label, amplitude / TWO_PI, phase)
    return float(amplitude), float(phase)


def _simultaneous_rates(
    config: Config, sim: PulseSimulator, left: float, right: float, omega_c: float, phases: Sequence[float]
) -> EffectiveRates:
    prog = three_qubit_program(
        config, left, right, left_phase=phases[0], right_phase=phases[1], omega_c=omega_c
    )
    return extract_effective_rates(sim, prog, (0, 1, 2), span="full")


def calibrate_omega_c(
    config: Config,
    sim: Optional[PulseSimulator] = None,
    amplitudes: Optional[Sequence[float]] = None,
    phases: Optional[Sequence[float]] = None,
) -> CalibrationResult:
    """
    Compensating 1X1 drive that makes the central qubit's Rabi rate independent of qubit 0.

    With both CR drives on, Omega_c is bisected until c_1X1 vanishes, i.e.
    |r0| = |r1| with r0, r1 = c_1X1 +/- c_ZX1. The right CR amplitude is then
    rescaled until c_ZX1 and c_1XZ agree within 2%, re-bisecting each time.

    Args:
        amplitudes: Starting (left, right) CR amplitudes in rad/us; defaults to [pulse] cr_amplitude_mhz
        phases: (left, right) CR phases; defaults to [pulse] cr_phases

    Raises:
        CalibrationError: If Omega_c is not bracketed or the bisection does not converge
    """
    sim = sim or build_simulator(config, (0, 1, 2))
    if amplitudes is None:
        amplitudes = [config.angular(a) for a in config.cr_amplitude_mhz[:2]]
    left, right = float(amplitudes[0]), float(amplitudes[1])
    if phases is None:
        phases = (tuple(config.cr_phases) + (0.0, 0.0))[:2]

    mismatch = math.inf
    omega_c = 0.0
    rates = None
    for iteration in range(MATCH_ITERATIONS):

        def central_rate(value: float) -> float:
            return _simultaneous_rates(config, sim, left, right, value, phases).get("IXI")

        low, high = central_rate(-OMEGA_C_LIMIT), central_rate(OMEGA_C_LIMIT)
        if low * high > 0:
            raise CalibrationError(
                f"c_1X1 does not change sign for |Omega_c|/2pi <= {OMEGA_C_LIMIT / TWO_PI:.1f} MHz"
            )
        try:
            omega_c = bisect(central_rate, -OMEGA_C_LIMIT, OMEGA_C_LIMIT, xtol=1e-9, maxiter=BISECTION_STEPS)
        except Exception as e:
            if isinstance(e, VQGOError):
                raise
            raise CalibrationError(f"Omega_c bisection did not converge: {e}")
        rates = _simultaneous_rates(config, sim, left, right, omega_c, phases)
        zx, xz = rates.get("ZXI"), rates.get("IXZ")
        if zx == 0 or xz == 0:
            raise CalibrationError("A CR block produces no entangling rate")
        mismatch = abs(abs(zx) - abs(xz)) / abs(zx)
        logger.debug("Omega_c iteration %d: %.5f MHz, ZX/XZ mismatch %.4f", iteration, omega_c / TWO_PI, mismatch)
        # the reported Omega_c must belong to the reported amplitudes
        if mismatch <= RATE_MATCH_TOLERANCE or iteration == MATCH_ITERATIONS - 1:
            break
        right *= abs(zx) / abs(xz)

    r0, r1 = conditional_rates(rates, "ZXI", "IXI")
    rabi = abs(abs(r0) - abs(r1)) / abs(r0) if r0 else math.inf
    result = CalibrationResult(
        name="omega_c",
        values={
            "omega_c_mhz": omega_c / TWO_PI,
            "left_amplitude_mhz": left / TWO_PI,
            "right_amplitude_mhz": right / TWO_PI,
            "left_phase": float(phases[0]),
            "right_phase": float(phases[1]),
            "zx1_mhz": rates.get("ZXI") / TWO_PI,
            "1xz_mhz": rates.get("IXZ") / TWO_PI,
            "r0_mhz": r0 / TWO_PI,
            "r1_mhz": r1 / TWO_PI,
        },
        residuals={"rate_match": mismatch},
        threshold=RATE_MATCH_TOLERANCE,
    )
    if rabi > RABI_MATCH_TOLERANCE and not result.failed:
        result.mark_failed(f"Rabi mismatch {rabi:.4f} above {RABI_MATCH_TOLERANCE}")
    result.residuals["rabi"] = rabi
    logger.info("Calibrated Omega_c/2pi = %.4f MHz (Rabi mismatch %.2e)", omega_c / TWO_PI, rabi)
    return result


def virtual_z_angles(rates: EffectiveRates, duration: float, labels: Sequence[str] = ("ZII", "IIZ")) -> Tuple[float, ...]:
    """Frame angles theta = -2 c T that undo the listed single-qubit Z rates."""
    return tuple(-2.0 * rates.get(label) * duration for label in labels)
