"""Gate scenarios: the two-qubit ZX gate and the staged three-qubit ZX1 + 1YZ gate."""

import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from ..analysis.tomography import chi_summary, dominant_elements, generable_mask, largest_outside
from ..analysis.zero_fidelity import build_plan
from ..config import Config
from ..device.pulses import envelope_table
from ..device.simulator import PulseSimulator
from ..errors import OptimizationAbortedError
from ..models.device import TWO_PI
from ..models.pulse import PulseProgram
from ..models.scenario import Scenario
from ..models.trace import OptimizationTrace, TraceRecord, TraceWriter
from ..noise.distortion import LineDistortion, apply_distortion
from ..optimization.bayesopt import optimize
from ..optimization.space import SearchSpace
from ..quantum.core import expm, pauli_exponential, pauli_operator
from .calibration import calibrate_phase, prescan_cr_amplitude
from .context import RunContext
from .evaluation import GateEvaluator, final_tomography, unitary_fidelity
from .programs import build_simulator, central_channel, gate_duration, three_qubit_program, zx_program

logger = logging.getLogger(__name__)

ZX_TARGET_ANGLE = math.pi / 4
BLOCK_FIDELITY_FLOOR = 0.8
CENTRAL_MAX_MHZ = 1.0
POLISH_EVALUATIONS = 60


def zx_target() -> np.ndarray:
    """exp(i pi/4 ZX)."""
    return pauli_exponential("ZX", ZX_TARGET_ANGLE)


def zx1_1yz_target() -> np.ndarray:
    """exp(i pi/4 (ZX1 + 1YZ))."""
    return expm(pauli_operator("ZXI") + pauli_operator("IYZ"), -ZX_TARGET_ANGLE)


def run_optimizer(
    ctx: RunContext,
    objective: Callable[[np.ndarray, int], Tuple[float, float]],
    space: SearchSpace,
    budget: int,
    trace_name: str,
    stage: int,
    noise_free: bool,
) -> OptimizationTrace:
    config = ctx.config
    return optimize(
        objective,
        space,
        budget,
        ctx.optimizer_seed(stage),
        exploration_fraction=config.exploration_fraction,
        trace_path=ctx.fresh_path(trace_name),
        noise_free=noise_free,
        acquisition_seeds=config.acquisition_seeds,
        refine=config.refine,
    )


def best_params(trace: OptimizationTrace, space: SearchSpace) -> np.ndarray:
    best = trace.best()
    if best is None:
        raise OptimizationAbortedError("Every evaluation of the optimization failed")
    return np.array([best.params[name] for name in space.names])


def run_zx_scenario(ctx: RunContext) -> None:
    """
    Optimize (CR level, target X level, virtual Z on qubit 0) towards exp(i pi/4 ZX).

    The CR phase is calibrated and the amplitude range pre-scanned first;
    full process tomography at the incumbent closes the run.
    """
    config = ctx.config
    result = ctx.result
    sim = build_simulator(config, (0, 1))
    distortion = config.distortion()
    readout = config.readout_model(2)

    table, amplitude = prescan_cr_amplitude(
        sim,
        lambda a: zx_program(config, a),
        (0, 1),
        "ZX",
        config.angular(config.cr_max_amplitude_mhz),
    )
    ctx.write_table("prescan.csv", table)
    phase_cal = calibrate_phase(config, amplitude, distortion, seed=ctx.optimizer_seed(10), sim=sim)
    result.calibrations.append(phase_cal)
    cr_phase = phase_cal["phase"]

    scenario = Scenario(
        name="zx-gate",
        target=zx_target(),
        space=SearchSpace.from_bounds(
            {
                "cr_level": (-1.0, 1.0),
                "drive_level": (-1.0, 1.0),
                "z_angle": (-math.pi, math.pi, "rad"),
            }
        ),
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
        prog = zx_program(
            config, amplitude, cr_level=x[0], drive_level=x[1], z_angle=x[2], cr_phase=cr_phase
        )
        return apply_distortion(prog, distortion)

    def objective(x: np.ndarray, iteration: int) -> Tuple[float, float]:
        return evaluator(sim.propagate(program(x)), iteration)

    trace = run_optimizer(ctx, objective, scenario.space, scenario.budget, "trace.jsonl", 0, evaluator.noise_free)
    best_x = best_params(trace, scenario.space)
    best_prog = program(best_x)
    u = sim.propagate(best_prog)
    chi, fidelity = final_tomography(u, scenario.target, readout, ctx.task_seed(5), config.tomography_shots)
    ctx.write_chi("zx.chi.txt", chi)
    ctx.write_table("envelopes.csv", envelope_table(best_prog))

    result.trace = trace
    result.chi = chi
    result.fidelity = fidelity
    result.metrics.update(
        {
            "cr_amplitude_mhz": amplitude / TWO_PI,
            "cr_phase": cr_phase,
            "best_params": scenario.space.as_dict(best_x),
            "noiseless_fidelity": unitary_fidelity(u, scenario.target),
            "dominant_elements": chi_summary(chi, 4),
        }
    )
    logger.info("ZX gate: incumbent %.4f, final process fidelity %.4f", trace.incumbent, fidelity)


def _polish(
    fidelity_of: Callable[[np.ndarray], float],
    start: np.ndarray,
    space: SearchSpace,
    trace: OptimizationTrace,
    trace_path: Path,
    evaluations: int = POLISH_EVALUATIONS,
) -> np.ndarray:
    """Nelder-Mead refinement of a noiseless block objective; evaluations are appended to the trace."""
    bounds = space.bounds
    best_x, best_value = start, fidelity_of(start)

    with TraceWriter(trace_path) as writer:

        def negative(x: np.ndarray) -> float:
            nonlocal best_x, best_value
            x = np.clip(x, bounds[:, 0], bounds[:, 1])
            value = fidelity_of(x)
            if value > best_value:
                best_x, best_value = x, value
            record = TraceRecord(
                iteration=len(trace),
                params=space.as_dict(x),
                value=value,
                stderr=0.0,
                tick=len(trace),
                incumbent=max(trace.incumbent, value),
                phase="polish",
            )
            trace.append(record)
            writer.write(record)
            return -value

        minimize(negative, start, method="Nelder-Mead", options={"maxfev": evaluations, "xatol": 1e-6, "fatol": 1e-9})
    return best_x


def _block_programs(
    config: Config, left: float, right: float, phases: Sequence[float]
) -> Dict[str, Callable[[np.ndarray], PulseProgram]]:
    return {
        "zx": lambda x: three_qubit_program(
            config, left, 0.0, left_phase=phases[0], left_level=x[0], z_angles=(x[1], 0.0)
        ),
        "yz": lambda x: three_qubit_program(
            config, 0.0, right, right_phase=phases[1], right_level=x[0], z_angles=(0.0, x[1])
        ),
    }


def run_zx1_1yz_scenario(ctx: RunContext) -> None:
    """
    Staged optimization of exp(i pi/4 (ZX1 + 1YZ)) with constant pulses.

    Stage 1 tunes each two-body block (CR level and the virtual Z of its
    control) against the noiseless block fidelity. Stage 2 tunes the
    amplitude and phase of a resonant correction on the central qubit
    against the configured figure of merit of the full target.

    Raises:
        OptimizationAbortedError: If a stage-1 block stays below fidelity 0.8
    """
    config = ctx.config
    result = ctx.result
    sim = build_simulator(config, (0, 1, 2))
    distortion = config.distortion()
    readout = config.readout_model(3)
    maximum = config.angular(config.cr_max_amplitude_mhz)

    _, left = prescan_cr_amplitude(sim, lambda a: three_qubit_program(config, a, 0.0), (0, 1, 2), "ZXI", maximum)
    _, right = prescan_cr_amplitude(sim, lambda a: three_qubit_program(config, 0.0, a), (0, 1, 2), "IXZ", maximum)
    phases = []
    for index, (side, amplitude) in enumerate((("left", left), ("right", right))):
        cal = calibrate_phase(
            config, amplitude, distortion, seed=ctx.optimizer_seed(10 + index), sim=sim, side=side
        )
        result.calibrations.append(cal)
        phases.append(cal["phase"])
    # the right block acts on the Y quadrature of the central qubit
    phases[1] += math.pi / 2

    block_space = SearchSpace.from_bounds({"level": (-1.0, 1.0), "z_angle": (-math.pi, math.pi, "rad")})
    block_targets = {"zx": pauli_exponential("ZXI", ZX_TARGET_ANGLE), "yz": pauli_exponential("IYZ", ZX_TARGET_ANGLE)}
    programs = _block_programs(config, left, right, phases)
    stage_budget = max(4, config.budget // 4)
    block_params: Dict[str, np.ndarray] = {}
    block_fidelity: Dict[str, float] = {}
    for stage, name in enumerate(("zx", "yz"), start=1):
        build, target = programs[name], block_targets[name]

        def block_value(x: np.ndarray, build=build, target=target) -> float:
            return unitary_fidelity(sim.propagate(apply_distortion(build(x), distortion)), target)

        trace_name = f"stage1-{name}.trace.jsonl"
        trace = run_optimizer(
            ctx, lambda x, _: block_value(x), block_space, stage_budget, trace_name, stage, True
        )
        best = _polish(block_value, best_params(trace, block_space), block_space, trace, ctx.path(trace_name))
        block_params[name] = best
        block_fidelity[name] = block_value(best)
        logger.info("Stage 1 block %s: fidelity %.4f", name, block_fidelity[name])
        if block_fidelity[name] < BLOCK_FIDELITY_FLOOR:
            raise OptimizationAbortedError(
                f"Stage-1 block {name} reached fidelity {block_fidelity[name]:.3f} < {BLOCK_FIDELITY_FLOOR}; "
                f"parameters {block_space.as_dict(best)}"
            )

    scenario = Scenario(
        name="zx1-1yz-gate",
        target=zx1_1yz_target(),
        space=SearchSpace.from_bounds(
            {
                "central_amplitude": (0.0, config.angular(CENTRAL_MAX_MHZ), "rad/us"),
                "central_phase": (-math.pi, math.pi, "rad"),
            }
        ),
        figure_of_merit=config.figure_of_merit,
        budget=max(4, config.budget - 2 * stage_budget),
        shots=config.shots,
    )
    plan = None
    if scenario.figure_of_merit == "zero-fidelity":
        plan = build_plan(scenario.target, config.zero_fidelity_samples, ctx.task_seed(4))
        ctx.save_plan("plan.json", plan)
    evaluator = GateEvaluator(
        scenario, readout, lambda it: ctx.task_seed(3, it), plan, config.zero_fidelity_shots
    )
    zx_x, yz_x = block_params["zx"], block_params["yz"]

    def full_program(x: np.ndarray) -> PulseProgram:
        prog = three_qubit_program(
            config,
            left,
            right,
            left_phase=phases[0],
            right_phase=phases[1],
            left_level=zx_x[0],
            right_level=yz_x[0],
            central=central_channel(x[0], x[1], config.ramp_samples),
            z_angles=(zx_x[1], yz_x[1]),
        )
        return apply_distortion(prog, distortion)

    def objective(x: np.ndarray, iteration: int) -> Tuple[float, float]:
        return evaluator(sim.propagate(full_program(x)), iteration)

    trace = run_optimizer(ctx, objective, scenario.space, scenario.budget, "trace.jsonl", 3, evaluator.noise_free)
    best_x = best_params(trace, scenario.space)
    best_prog = full_program(best_x)
    u = sim.propagate(best_prog)
    chi, fidelity = final_tomography(u, scenario.target, readout, ctx.task_seed(5), config.tomography_shots)
    ctx.write_chi("zx1-1yz.chi.txt", chi)
    ctx.write_table("envelopes.csv", envelope_table(best_prog))

    audit = _stage_audit(
        config, sim, distortion, programs, block_params, block_targets, block_fidelity, best_x
    )
    mask = generable_mask(3, ["ZXI", "IYZ"])
    result.trace = trace
    result.chi = chi
    result.fidelity = fidelity
    result.metrics.update(
        {
            "cr_amplitudes_mhz": [left / TWO_PI, right / TWO_PI],
            "cr_phases": phases,
            "block_fidelity": block_fidelity,
            "best_params": scenario.space.as_dict(best_x),
            "noiseless_fidelity": unitary_fidelity(u, scenario.target),
            "largest_non_generable": largest_outside(chi, mask),
            "dominant_elements": [[r, c, abs(v)] for r, c, v in dominant_elements(chi, 9)],
            "stage_audit": audit,
        }
    )
    logger.info("ZX1+1YZ gate: incumbent %.4f, final process fidelity %.4f", trace.incumbent, fidelity)


def _stage_audit(
    config: Config,
    sim: PulseSimulator,
    distortion: LineDistortion,
    programs: Dict[str, Callable[[np.ndarray], PulseProgram]],
    block_params: Dict[str, np.ndarray],
    block_targets: Dict[str, np.ndarray],
    block_fidelity: Dict[str, float],
    central_x: np.ndarray,
) -> List[Dict[str, Any]]:
    """Block fidelities with the stage-2 correction switched on, against the correction's rotation angle."""
    correction = central_channel(central_x[0], central_x[1], config.ramp_samples)
    bound = float(central_x[0]) * gate_duration(config)
    rows = []
    for name, build in programs.items():
        prog = build(block_params[name])
        corrected = PulseProgram(
            channels=prog.channels + (correction,),
            total_duration=prog.total_duration,
            sample_period=prog.sample_period,
            virtual_z=prog.virtual_z,
        )
        after = unitary_fidelity(sim.propagate(apply_distortion(corrected, distortion)), block_targets[name])
        rows.append(
            {
                "block": name,
                "before": block_fidelity[name],
                "after": after,
                "degradation": block_fidelity[name] - after,
                "correction_angle": bound,
            }
        )
    return rows
