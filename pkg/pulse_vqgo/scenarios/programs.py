"""Simulators and pulse programs shared by the scenarios."""

import math
from dataclasses import replace
from typing import Optional, Sequence

from ..config import Config
from ..device.pulses import (
    FloquetDrive,
    cross_resonance_channel,
    floquet_channel,
    resonant_channel,
    snap_duration,
)
from ..device.qubit import QubitSimulator
from ..device.simulator import PulseSimulator
from ..device.transmon import TransmonSimulator
from ..errors import ConfigurationError
from ..models.device import DeviceModel, QubitModel
from ..models.pulse import DriveChannel, PulseProgram, VirtualZ

# Channel names; [noise] phase_offsets and amplitude_scales refer to these.
CR_LEFT = "cr01"
CR_RIGHT = "cr21"
TARGET_DRIVE = "drive1"
CENTRAL_DRIVE = "central1"
COMPENSATION = "comp1"


def slice_qubit_model(model: QubitModel, qubits: Sequence[int]) -> QubitModel:
    """Sub-chain of consecutive qubits."""
    qubits = list(qubits)
    if qubits != list(range(qubits[0], qubits[0] + len(qubits))):
        raise ConfigurationError("Sub-chains must be consecutive qubits")
    first, last = qubits[0], qubits[-1]
    if first < 0 or last >= model.n:
        raise ConfigurationError(f"Qubits {qubits} outside the {model.n}-qubit chain")
    return QubitModel(
        n=len(qubits),
        qubit_freq=model.qubit_freq[first : last + 1],
        coupling=model.coupling[first:last],
    )


def build_simulator(
    config: Config,
    qubits: Sequence[int],
    model: Optional[QubitModel] = None,
    device: Optional[DeviceModel] = None,
) -> PulseSimulator:
    """
    Simulator of a consecutive sub-chain in the configured tier.

    Args:
        config: Run configuration
        qubits: Consecutive qubit indices of the configured chain
        model: Qubit model to slice instead of the configured one (drifted devices)
        device: Transmon chain to slice instead of the configured one
    """
    qubits = list(qubits)
    if config.tier == "qubit":
        return QubitSimulator(slice_qubit_model(model or config.qubit_model(), qubits))
    dev = device or config.device_model()
    first, last = qubits[0], qubits[-1]
    if last >= dev.n:
        raise ConfigurationError(f"Qubits {qubits} outside the {dev.n}-transmon chain")
    size = len(qubits)
    sub = replace(
        dev,
        n=size,
        omega_h=dev.omega_h[first : last + 1],
        epsilon=dev.epsilon[first : last + 1],
        coupling=dev.coupling[first:last],
        global_truncation=min(dev.global_truncation, dev.levels_per_transmon**size),
    )
    return TransmonSimulator(sub)


def gate_duration(config: Config) -> float:
    return snap_duration(config.duration_us, config.sample_period)


def zx_program(
    config: Config,
    cr_amplitude: float,
    cr_level: float = 1.0,
    drive_level: float = 0.0,
    z_angle: float = 0.0,
    cr_phase: float = 0.0,
    duration: Optional[float] = None,
) -> PulseProgram:
    """
    Two-qubit ZX program: CR drive on qubit 0 at qubit 1's frequency, a
    resonant X correction on qubit 1 and a virtual Z on qubit 0.
    """
    channels = [
        cross_resonance_channel(
            CR_LEFT, 0, 1, cr_amplitude, phase=cr_phase, level=cr_level, ramp_samples=config.ramp_samples
        ),
        resonant_channel(
            TARGET_DRIVE,
            1,
            config.angular(config.resonant_amplitude_mhz),
            level_x=drive_level,
            ramp_samples=config.ramp_samples,
        ),
    ]
    return PulseProgram(
        channels=tuple(channels),
        total_duration=gate_duration(config) if duration is None else duration,
        sample_period=config.sample_period,
        virtual_z=(VirtualZ(0, z_angle),),
    )


def compensation_channel(omega_c: float, ramp_samples: int = 0) -> DriveChannel:
    """Resonant -X drive on the central qubit; a negative Omega_c flips it to +X."""
    return resonant_channel(
        COMPENSATION, 1, abs(omega_c), phase=math.pi if omega_c >= 0 else 0.0, ramp_samples=ramp_samples
    )


def three_qubit_program(
    config: Config,
    left: float,
    right: float,
    left_phase: float = 0.0,
    right_phase: float = 0.0,
    left_level: float = 1.0,
    right_level: float = 1.0,
    central: Optional[DriveChannel] = None,
    omega_c: Optional[float] = None,
    z_angles: Sequence[float] = (0.0, 0.0),
    duration: Optional[float] = None,
    ramp_samples: Optional[int] = None,
) -> PulseProgram:
    """
    Three-qubit program with both side qubits driven at the central qubit's frequency.

    Args:
        left: CR amplitude of qubit 0 (rad/us)
        right: CR amplitude of qubit 2 (rad/us)
        left_level, right_level: Flat envelope levels in [-1, 1]
        central: Optional resonant channel on qubit 1
        omega_c: Optional compensating drive on qubit 1
        z_angles: Virtual-Z angles of qubits 0 and 2
    """
    ramp = config.ramp_samples if ramp_samples is None else ramp_samples
    channels = [
        cross_resonance_channel(CR_LEFT, 0, 1, left, phase=left_phase, level=left_level, ramp_samples=ramp),
        cross_resonance_channel(CR_RIGHT, 2, 1, right, phase=right_phase, level=right_level, ramp_samples=ramp),
    ]
    if central is not None:
        channels.append(central)
    if omega_c is not None:
        channels.append(compensation_channel(omega_c, ramp))
    return PulseProgram(
        channels=tuple(channels),
        total_duration=gate_duration(config) if duration is None else duration,
        sample_period=config.sample_period,
        virtual_z=(VirtualZ(0, float(z_angles[0])), VirtualZ(2, float(z_angles[1]))),
    )


def central_channel(amplitude: float, phase: float, ramp_samples: int) -> DriveChannel:
    return resonant_channel(CENTRAL_DRIVE, 1, abs(amplitude), phase=phase, ramp_samples=ramp_samples)


def central_floquet_channel(drive: FloquetDrive, orientation: float = 1.0) -> DriveChannel:
    """Floquet drive on the +1Y1 quadrature, or on -1Y1 for a negative orientation."""
    return floquet_channel(CENTRAL_DRIVE, 1, drive, phase=math.copysign(math.pi / 2, orientation))
