"""Floquet-engineered three-body ZYZ gate: block preparation, dynamics and optimization."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..analysis.tomography import chi_summary
from ..analysis.zero_fidelity import build_plan
from ..config import Config
from ..device.pulses import FloquetDrive, envelope_table, make_floquet_drive, snap_duration
from ..device.rates import extract_effective_rates
from ..device.simulator import PulseSimulator
from ..models.device import TWO_PI
from ..models.pulse import PulseProgram
from ..models.scenario import CalibrationResult, Scenario
from ..optimization.space import SearchSpace
from ..quantum.core import cumulative_propagators, pauli_exponential, pauli_operator, product_ket
from .calibration import RATE_MATCH_TOLERANCE, calibrate_cr_amplitude, calibrate_omega_c, virtual_z_angles
from .context import RunContext
from .drift import drifted_unitary
from .evaluation import GateEvaluator, final_tomography, unitary_fidelity
from .gates import best_params, run_optimizer
from .programs import build_simulator, central_floquet_channel, three_qubit_program

logger = logging.getLogger(__name__)

ZYZ_ANGLE = 6 * math.pi / 25
POINTS_PER_PERIOD = 50
WEIGHT_BOUNDS_MHZ = ((-0.5, 0.5), (0.0, 4.0), (0.0, 4.0))
COMPENSATION_RANGE_MHZ = 1.0


def floquet_target() -> np.ndarray:
    """exp(-i 6pi/25 ZYZ)."""
    return pauli_exponential("ZYZ", -ZYZ_ANGLE)


def floquet_drive(config: Config, weights_mhz: Optional[Sequence[float]] = None) -> FloquetDrive:
    """Central-qubit drive from [pulse] floquet_* settings, optionally with other Fourier weights (MHz)."""
    weights = config.floquet_weights_mhz if weights_mhz is None else weights_mhz
    return make_floquet_drive(
        [config.angular(w) for w in weights],
        config.angular(config.floquet_frequency_mhz),
        config.floquet_periods,
    )


def floquet_duration(config: Config, drive: FloquetDrive) -> float:
    return snap_duration(drive.duration, config.sample_period)


def series_times(config: Config, drive: FloquetDrive, points: int = POINTS_PER_PERIOD) -> np.ndarray:
    """Micromotion grid: ``points`` per Floquet period, ending at the last sample of the program."""
    duration = floquet_duration(config, drive)
    times = np.linspace(0.0, drive.duration, config.floquet_periods * points + 1)
    return np.clip(times, 0.0, duration)


def effective_series(
    config: Config, drive: FloquetDrive, times: Sequence[float], orientation: float = 1.0
) -> List[np.ndarray]:
    """
    Propagators of H = J (ZX1 + 1XZ) + s Omega(t)/2 1Y1 at ``times``.

    J is [pulse] zx_rate_mhz and s the orientation sign. Omega(t) is held
    for one AWG sample, like the programs played on the simulators.
    """
    coupling = config.angular(config.zx_rate_mhz)
    sample = config.sample_period
    duration = floquet_duration(config, drive)
    n_samples = int(round(duration / sample))
    boundaries = np.union1d(np.arange(n_samples + 1) * sample, np.asarray(times, dtype=float))
    midpoints = 0.5 * (boundaries[1:] + boundaries[:-1])
    held = (np.clip(np.floor(midpoints / sample), 0, max(n_samples - 1, 0)) + 0.5) * sample
    static = coupling * (pauli_operator("ZXI") + pauli_operator("IXZ"))
    omega = math.copysign(1.0, orientation) * drive.omega_of_t(held) / 2.0
    stack = static[None, :, :] + omega[:, None, None] * pauli_operator("IYI")[None, :, :]
    checkpoints = np.searchsorted(boundaries, times)
    return cumulative_propagators(stack, np.diff(boundaries), checkpoints)


def floquet_orientation(config: Config, drive: FloquetDrive) -> float:
    """Sign of the 1Y1 drive whose stroboscopic effective gate is closest to the target."""
    target = floquet_target()
    duration = floquet_duration(config, drive)
    scores = {
        sign: unitary_fidelity(effective_series(config, drive, [duration], sign)[0], target)
        for sign in (1.0, -1.0)
    }
    sign = max(scores, key=scores.get)
    logger.debug("Floquet orientation %+.0f (fidelities %s)", sign, scores)
    return sign


def population_table(times: Sequence[float], unitaries: Sequence[np.ndarray]) -> pd.DataFrame:
    """P(+++) and P(---) along a propagator series started from |+++>."""
    plus, minus = product_ket("+++"), product_ket("---")
    rows = []
    for t, u in zip(times, unitaries):
        psi = u @ plus
        rows.append(
            {
                "time_us": float(t),
                "P_plus": float(abs(np.vdot(plus, psi)) ** 2),
                "P_minus": float(abs(np.vdot(minus, psi)) ** 2),
            }
        )
    return pd.DataFrame(rows, columns=["time_us", "P_plus", "P_minus"])


def stroboscopic(table: pd.DataFrame, period: float) -> pd.DataFrame:
    """Rows of a population table at integer multiples of the Floquet period."""
    phase = np.mod(table["time_us"] / period + 0.5, 1.0) - 0.5
    return table[np.abs(phase) < 1e-6].reset_index(drop=True)


@dataclass(frozen=True)
class FloquetBlocks:
    """Pre-optimized two-body blocks the central drive is added to."""

    left: float
    right: float
    left_phase: float
    right_phase: float
    omega_c: float
    z_angles: Tuple[float, float]
    calibration: CalibrationResult


def prepare_floquet_blocks(
    config: Config, sim: PulseSimulator, drive: FloquetDrive
) -> FloquetBlocks:
    """
    ZX1 and 1XZ blocks of equal strength J with the 1X1 rate compensated.

    On the qubit tier both CR amplitudes are calibrated to J, then Omega_c is
    bisected. The transmon tier uses the configured CR amplitudes, phases
    and compensating amplitude. The static Z11 and 11Z rates are undone by
    virtual Z frames on the side qubits.
    """
    duration = floquet_duration(config, drive)
    if config.tier == "qubit":
        rate = config.angular(config.zx_rate_mhz)
        left, left_phase = calibrate_cr_amplitude(config, sim, "left", rate)
        right, right_phase = calibrate_cr_amplitude(config, sim, "right", rate)
        omega_cal = calibrate_omega_c(config, sim, (left, right), (left_phase, right_phase))
        right = TWO_PI * omega_cal["right_amplitude_mhz"]
        omega_c = TWO_PI * omega_cal["omega_c_mhz"]
    else:
        left, right = (config.angular(a) for a in config.cr_amplitude_mhz[:2])
        left_phase, right_phase = (tuple(config.cr_phases) + (0.0, 0.0))[:2]
        omega_c = config.angular(config.compensation_mhz)

    prog = three_qubit_program(
        config, left, right, left_phase, right_phase, omega_c=omega_c, duration=duration, ramp_samples=0
    )
    rates = extract_effective_rates(sim, prog, (0, 1, 2), span="full")
    z_angles = virtual_z_angles(rates, duration)
    zx, xz = rates.get("ZXI"), rates.get("IXZ")
    mismatch = abs(abs(zx) - abs(xz)) / abs(zx) if zx else math.inf
    calibration = CalibrationResult(
        name="floquet-blocks",
        values={
            "left_amplitude_mhz": left / TWO_PI,
            "right_amplitude_mhz": right / TWO_PI,
            "left_phase": float(left_phase),
            "right_phase": float(right_phase),
            "omega_c_mhz": omega_c / TWO_PI,
            "zx1_mhz": zx / TWO_PI,
            "1xz_mhz": xz / TWO_PI,
            "1x1_mhz": rates.get("IXI") / TWO_PI,
            "z_angle_left": z_angles[0],
            "z_angle_right": z_angles[1],
        },
        residuals={"rate_match": mismatch},
        threshold=RATE_MATCH_TOLERANCE,
    )
    if calibration.failed:
        logger.warning("Floquet blocks: %s", calibration.reason)
    return FloquetBlocks(
        left=float(left),
        right=float(right),
        left_phase=float(left_phase),
        right_phase=float(right_phase),
        omega_c=float(omega_c),
        z_angles=(float(z_angles[0]), float(z_angles[1])),
        calibration=calibration,
    )


def floquet_program(
    config: Config,
    blocks: FloquetBlocks,
    drive: FloquetDrive,
    orientation: float = 1.0,
    compensation_offset: float = 0.0,
) -> PulseProgram:
    """Both CR blocks, the Floquet 1Y1 drive and the shifted 1X1 compensation, without ramps."""
    return three_qubit_program(
        config,
        blocks.left,
        blocks.right,
        blocks.left_phase,
        blocks.right_phase,
        central=central_floquet_channel(drive, orientation),
        omega_c=blocks.omega_c + compensation_offset,
        z_angles=blocks.z_angles,
        duration=floquet_duration(config, drive),
        ramp_samples=0,
    )


def floquet_space(blocks: FloquetBlocks) -> SearchSpace:
    base = blocks.omega_c / TWO_PI
    bounds = {f"omega{k}_mhz": (low, high, "MHz") for k, (low, high) in enumerate(WEIGHT_BOUNDS_MHZ)}
    bounds["compensation_mhz"] = (base - COMPENSATION_RANGE_MHZ, base + COMPENSATION_RANGE_MHZ, "MHz")
    return SearchSpace.from_bounds(bounds)


def run_floquet_zyz_scenario(ctx: RunContext) -> None:
    """
    Optimize the Floquet weights and the 1X1 compensation towards exp(-i 6pi/25 ZYZ).

    Emits the |+++>/|---> populations of the configured weights on the
    micromotion grid, for the simulator tier and for the ideal effective
    Hamiltonian, before the optimization starts. With drift enabled each
    evaluation happens one tick after the previous one.
    """
    config = ctx.config
    result = ctx.result
    sim = build_simulator(config, (0, 1, 2))
    distortion = config.distortion()
    drift = config.drift_process()
    readout = config.readout_model(3)
    drive = floquet_drive(config)

    blocks = prepare_floquet_blocks(config, sim, drive)
    result.calibrations.append(blocks.calibration)
    orientation = floquet_orientation(config, drive)

    times = series_times(config, drive)
    simulated = population_table(times, sim.propagate_series(floquet_program(config, blocks, drive, orientation), times))
    ideal = population_table(times, effective_series(config, drive, times, orientation))
    ctx.write_table("populations.csv", simulated)
    ctx.write_table("populations-effective.csv", ideal)

    scenario = Scenario(
        name="floquet-zyz",
        target=floquet_target(),
        space=floquet_space(blocks),
        figure_of_merit=config.figure_of_merit,
        budget=config.budget,
        shots=config.shots,
    )
    plan = None
    if scenario.figure_of_merit == "zero-fidelity":
        plan = build_plan(scenario.target, config.zero_fidelity_samples, ctx.task_seed(4))
        ctx.save_plan("plan.json", plan)
    evaluator = GateEvaluator(
        scenario, readout, lambda it: ctx.task_seed(3, it), plan, config.zero_fidelity_shots
    )

    def program(x: np.ndarray) -> PulseProgram:
        return floquet_program(
            config,
            blocks,
            floquet_drive(config, x[:3]),
            orientation,
            config.angular(x[3]) - blocks.omega_c,
        )

    def unitary(x: np.ndarray, tick: int) -> np.ndarray:
        return drifted_unitary(config, (0, 1, 2), program(x), drift, tick, sim, distortion)

    def objective(x: np.ndarray, iteration: int) -> Tuple[float, float]:
        return evaluator(unitary(x, iteration), iteration)

    trace = run_optimizer(ctx, objective, scenario.space, scenario.budget, "trace.jsonl", 0, evaluator.noise_free)
    best_x = best_params(trace, scenario.space)
    u = unitary(best_x, scenario.budget)
    chi, fidelity = final_tomography(u, scenario.target, readout, ctx.task_seed(5), config.tomography_shots)
    ctx.write_chi("floquet.chi.txt", chi)
    ctx.write_table("envelopes.csv", envelope_table(program(best_x)))

    marks = stroboscopic(simulated, drive.period)
    ideal_marks = stroboscopic(ideal, drive.period)
    result.trace = trace
    result.chi = chi
    result.fidelity = fidelity
    result.metrics.update(
        {
            "orientation": orientation,
            "best_params": scenario.space.as_dict(best_x),
            "noiseless_fidelity": unitary_fidelity(u, scenario.target),
            "stroboscopic_p_minus": marks["P_minus"].tolist(),
            "effective_stroboscopic_p_minus": ideal_marks["P_minus"].tolist(),
            "oracle_p_minus": math.sin(ZYZ_ANGLE) ** 2,
            "dominant_elements": chi_summary(chi, 4),
        }
    )
    logger.info("Floquet ZYZ gate: incumbent %.4f, final process fidelity %.4f", trace.incumbent, fidelity)
