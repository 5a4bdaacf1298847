"""Scenario registry, run bookkeeping and bit-exact replay."""

import json
import logging
import math
import tempfile
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

from .. import __version__
from ..config import Config
from ..device.rates import conditional_rates, extract_effective_rates
from ..errors import ConfigurationError, ReplayMismatchError
from ..models.device import TWO_PI
from ..models.scenario import ScenarioResult
from ..models.trace import OptimizationTrace, utc_timestamp
from ..utils.date_helpers import elapsed_seconds
from ..utils.validators import validate_required_fields
from .baselines import run_identity_baseline, run_reduced_scatter
from .calibration import calibrate_omega_c, calibrate_phase
from .context import RunContext
from .drift_study import run_drift_study
from .floquet import run_floquet_zyz_scenario
from .gates import run_zx1_1yz_scenario, run_zx_scenario
from .programs import CR_LEFT, build_simulator, three_qubit_program

logger = logging.getLogger(__name__)

RUN_FILE = "run.json"
CONFIG_FILE = "config.ini"


def run_phase_calibration(ctx: RunContext) -> None:
    """Calibrate the CR phase of the qubit-0 drive and compare it with the injected line offset."""
    config = ctx.config
    distortion = config.distortion()
    calibration = calibrate_phase(
        config,
        distortion=distortion,
        seed=ctx.optimizer_seed(10),
        trace_path=ctx.fresh_path("trace.jsonl"),
    )
    ctx.result.calibrations.append(calibration)
    ctx.result.trace = OptimizationTrace.from_jsonl(ctx.path("trace.jsonl"))
    offset = distortion.phase_offsets.get(CR_LEFT, 0.0)
    # the calibrated phase should undo the line offset, modulo pi
    error = math.remainder(calibration["phase"] + offset, math.pi)
    ctx.result.metrics.update(
        {
            "phase": calibration["phase"],
            "line_offset": offset,
            "offset_error": abs(error),
            "flip_population": calibration.residuals["flip_population"],
        }
    )


def run_omega_c_calibration(ctx: RunContext) -> None:
    """Calibrate the compensating 1X1 drive and report the rates it leaves behind."""
    config = ctx.config
    sim = build_simulator(config, (0, 1, 2))
    calibration = calibrate_omega_c(config, sim)
    ctx.result.calibrations.append(calibration)
    prog = three_qubit_program(
        config,
        TWO_PI * calibration["left_amplitude_mhz"],
        TWO_PI * calibration["right_amplitude_mhz"],
        left_phase=calibration["left_phase"],
        right_phase=calibration["right_phase"],
        omega_c=TWO_PI * calibration["omega_c_mhz"],
    )
    rates = extract_effective_rates(sim, prog, (0, 1, 2), span="full")
    r0, r1 = conditional_rates(rates, "ZXI", "IXI")
    ctx.result.metrics.update(
        {
            "omega_c_mhz": calibration["omega_c_mhz"],
            "rates_mhz": rates.as_mhz(),
            "r0_mhz": r0 / TWO_PI,
            "r1_mhz": r1 / TWO_PI,
            "residual_1x1_ratio": abs(rates.get("IXI")) / abs(rates.get("ZXI")) if rates.get("ZXI") else math.inf,
        }
    )


RUNNERS: Dict[str, Callable[[RunContext], None]] = {
    "phase-calibration": run_phase_calibration,
    "omega-c-calibration": run_omega_c_calibration,
    "zx-gate": run_zx_scenario,
    "zx1-1yz-gate": run_zx1_1yz_scenario,
    "floquet-zyz": run_floquet_zyz_scenario,
    "identity-baseline": run_identity_baseline,
    "reduced-scatter": run_reduced_scatter,
    "drift-study": run_drift_study,
}


def run_scenario(config: Config, scenario: Optional[str] = None, run_dir: Optional[Path] = None) -> ScenarioResult:
    """
    Run one scenario and record its config snapshot and run metadata.

    Args:
        config: Run configuration
        scenario: Scenario name, default [scenario] name
        run_dir: Artifact directory, default <output dir>/<scenario>-seed<seed>

    Returns:
        ScenarioResult with the artifacts registered

    Raises:
        ConfigurationError: For an unknown scenario
    """
    name = scenario or config.scenario
    if name not in RUNNERS:
        raise ConfigurationError(f"Unknown scenario '{name}'")
    config.scenario = name
    config.validate()
    ctx = RunContext(config, name, run_dir)
    ctx.write_text(CONFIG_FILE, config.to_ini())
    started = utc_timestamp()
    logger.info("Running %s with seed %d in %s", name, ctx.seed, ctx.run_dir)
    RUNNERS[name](ctx)
    finished = utc_timestamp()
    ctx.result.add_artifact(RUN_FILE)
    ctx.write_json(
        RUN_FILE,
        {
            "seed": ctx.seed,
            "scenario": name,
            "version": __version__,
            "started": started,
            "finished": finished,
            "elapsed_seconds": elapsed_seconds(started, finished),
            "tier": config.tier,
            "noise": config.noise_record(),
            "result": ctx.result.summary(),
        },
    )
    logger.info("Finished %s: %s", name, ctx.result)
    return ctx.result


def _same_artifact(name: str, recorded: Path, replayed: Path) -> bool:
    if name.endswith(".jsonl"):
        return (
            OptimizationTrace.from_jsonl(recorded).without_timestamps()
            == OptimizationTrace.from_jsonl(replayed).without_timestamps()
        )
    return recorded.read_bytes() == replayed.read_bytes()


def replay(run_dir: Union[str, Path]) -> List[str]:
    """
    Re-run a recorded scenario from its config snapshot and seed and compare every artifact.

    run.json is skipped and trace files are compared without their
    timestamps; everything else must match byte for byte.

    Returns:
        Names of the compared artifacts

    Raises:
        ConfigurationError: If the run directory lacks its snapshot or metadata
        ReplayMismatchError: If an artifact is missing or differs
    """
    run_dir = Path(run_dir)
    config_path, run_path = run_dir / CONFIG_FILE, run_dir / RUN_FILE
    if not config_path.exists() or not run_path.exists():
        raise ConfigurationError(f"{run_dir} has no {CONFIG_FILE} and {RUN_FILE}")
    try:
        recorded = json.loads(run_path.read_text(encoding="utf-8"))
        validate_required_fields(recorded, ["seed", "scenario", "result"])
    except ValueError as e:
        raise ConfigurationError(f"Malformed {run_path}: {e}")
    config = Config.from_file(config_path)
    config.set_seed(int(recorded["seed"]))
    artifacts = [name for name in recorded["result"]["artifacts"] if name != RUN_FILE]

    with tempfile.TemporaryDirectory() as scratch:
        config.set_output_dir(scratch)
        replay_dir = Path(scratch) / run_dir.name
        run_scenario(config, recorded["scenario"], replay_dir)
        mismatched = []
        for name in artifacts:
            original, replayed = run_dir / name, replay_dir / name
            if not original.exists() or not replayed.exists() or not _same_artifact(name, original, replayed):
                mismatched.append(name)
    if mismatched:
        raise ReplayMismatchError(f"Replay of {run_dir} differs in {', '.join(sorted(mismatched))}")
    logger.info("Replay of %s reproduced %d artifacts", run_dir, len(artifacts))
    return artifacts
