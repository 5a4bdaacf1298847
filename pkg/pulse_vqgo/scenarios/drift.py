"""Gates played on a drifting device."""

import logging
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from ..config import Config
from ..device.simulator import PulseSimulator, z_signs
from ..models.pulse import PulseProgram
from ..noise.distortion import LineDistortion, apply_distortion
from ..noise.drift import DriftProcess, DriftState
from .programs import build_simulator

logger = logging.getLogger(__name__)


def drifted_simulator(config: Config, qubits: Sequence[int], state: DriftState) -> PulseSimulator:
    """Simulator of the sub-chain after the full chain moved by ``state``."""
    if config.tier == "qubit":
        model = config.qubit_model().perturbed(state.frequency_offsets, state.coupling_offsets)
        return build_simulator(config, qubits, model=model)
    device = config.device_model()
    drifted = replace(
        device,
        omega_h=tuple(float(v) for v in np.add(device.omega_h, state.frequency_offsets)),
        coupling=tuple(float(v) for v in np.add(device.coupling, state.coupling_offsets)),
    )
    return build_simulator(config, qubits, device=drifted)


def drifted_unitary(
    config: Config,
    qubits: Sequence[int],
    prog: PulseProgram,
    drift: DriftProcess,
    tick: int,
    base_sim: PulseSimulator,
    distortion: Optional[LineDistortion] = None,
) -> np.ndarray:
    """
    Propagator of ``prog`` played ``tick`` ticks into the drift path.

    Carriers stay at the undrifted qubit frequencies and the result is
    reported in the undrifted qubit frame, as a fixed control stack would
    see it. Line-phase drift adds to the static distortion.
    """
    state = drift.offsets(tick, config.chain_length(), [ch.name for ch in prog.channels])
    distortion = distortion or LineDistortion()
    prog = apply_distortion(prog, distortion.combined(state.phase_offsets))
    if not any(state.frequency_offsets) and not any(state.coupling_offsets):
        return base_sim.propagate(prog)

    sim = drifted_simulator(config, qubits, state)
    delta = np.asarray(sim.qubit_frequencies) - np.asarray(base_sim.qubit_frequencies)
    logger.debug("Tick %d: dressed frequency shifts %s rad/us", tick, ", ".join(f"{d:+.2e}" for d in delta))
    pinned = prog
    for channel in prog.channels:
        pinned = pinned.replace_channel(channel.name, detuning=channel.detuning - delta[channel.carrier_qubit])
    u = sim.propagate(pinned)
    phases = z_signs(len(delta)) @ (delta * prog.total_duration / 2.0)
    return np.exp(-1j * phases)[:, None] * u
