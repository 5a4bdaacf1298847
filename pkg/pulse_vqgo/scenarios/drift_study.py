"""Repeated process tomography of fixed pulses across a stretch of drift."""

import logging
import math

from ..analysis.tomography import UnitaryOracle, mutual_overlap, process_tomography
from ..config import Config
from ..device.rates import extract_effective_rates
from ..device.simulator import PulseSimulator
from ..models.pulse import PulseProgram
from ..noise.readout import SampledOracle
from .context import RunContext
from .drift import drifted_unitary
from .floquet import floquet_drive, floquet_orientation, floquet_program, prepare_floquet_blocks
from .programs import build_simulator, zx_program

logger = logging.getLogger(__name__)


def static_zx_program(config: Config, sim: PulseSimulator) -> PulseProgram:
    """Configured CR pulse with its level set for a pi/4 ZX rotation; the drift study's control gate."""
    amplitude = config.angular(config.cr_amplitude_mhz[0])
    full = zx_program(config, amplitude)
    rate = extract_effective_rates(sim, full, (0, 1)).get("ZX")
    level = min(1.0, (math.pi / 4) / (abs(rate) * full.total_duration)) if rate else 1.0
    return zx_program(config, amplitude, cr_level=level)


def run_drift_study(ctx: RunContext) -> None:
    """
    Tomography of a fixed Floquet pulse and a fixed static ZX pulse, once at
    tick 0 and once ``drift_ticks`` later, with their mutual chi overlap.
    """
    config = ctx.config
    result = ctx.result
    drift = config.drift_process()
    distortion = config.distortion()
    shots = config.tomography_shots or None

    sim3 = build_simulator(config, (0, 1, 2))
    drive = floquet_drive(config)
    blocks = prepare_floquet_blocks(config, sim3, drive)
    result.calibrations.append(blocks.calibration)
    floquet = floquet_program(config, blocks, drive, floquet_orientation(config, drive))
    sim2 = build_simulator(config, (0, 1))
    static = static_zx_program(config, sim2)

    experiments = (
        ("floquet", (0, 1, 2), sim3, floquet),
        ("zx", (0, 1), sim2, static),
    )
    report = {}
    for index, (label, qubits, sim, prog) in enumerate(experiments):
        readout = config.readout_model(len(qubits))
        chis = []
        for run, (tag, tick) in enumerate((("start", 0), ("end", config.drift_ticks))):
            u = drifted_unitary(config, qubits, prog, drift, tick, sim, distortion)
            oracle = SampledOracle(UnitaryOracle(u), readout, ctx.task_seed(9, index, run))
            chi = process_tomography(oracle, len(qubits), shots)
            ctx.write_chi(f"{label}-{tag}.chi.txt", chi)
            chis.append(chi)
        report[label] = {
            "mutual_overlap": mutual_overlap(chis[0], chis[1]),
            "max_distance": chis[0].max_distance(chis[1]),
        }
        logger.info(
            "Drift over %d ticks, %s pulse: overlap %.4f, max distance %.4f",
            config.drift_ticks,
            label,
            report[label]["mutual_overlap"],
            report[label]["max_distance"],
        )

    result.metrics.update(
        {
            "ticks": config.drift_ticks,
            "elapsed_seconds": config.drift_ticks * drift.tick_duration,
            "drift": {
                "frequency_step": drift.frequency_step,
                "coupling_step": drift.coupling_step,
                "phase_step": drift.phase_step,
            },
            **report,
        }
    )
