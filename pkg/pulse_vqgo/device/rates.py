"""Effective-Hamiltonian rate extraction for cross-resonance style drives."""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from typing_extensions import TypeAlias

from ..errors import DegenerateFitError, ValidationError
from ..models.device import DeviceModel, QubitModel
from ..models.process import EffectiveRates
from ..models.pulse import PulseProgram
from ..quantum.core import pauli_basis
from .blockdiag import least_action_block_diagonalize
from .qubit import QubitSimulator
from .simulator import PulseSimulator, z_signs
from .transmon import TransmonSimulator

logger = logging.getLogger(__name__)

FIT_RESIDUAL_LIMIT = 0.05
DRESSING_LIMIT = 0.25
REGRESSION_POINTS = 8

CHAIN_TERMS = ("ZII", "IIZ", "ZZI", "IZZ", "IXI", "ZXI", "IXZ")
SPANS = ("pair", "chain", "full")

SystemLike: TypeAlias = Union[PulseSimulator, QubitModel, DeviceModel]


def as_simulator(system: SystemLike) -> PulseSimulator:
    if isinstance(system, PulseSimulator):
        return system
    if isinstance(system, QubitModel):
        return QubitSimulator(system)
    if isinstance(system, DeviceModel):
        return TransmonSimulator(system)
    raise ValidationError(f"Cannot simulate {type(system).__name__}")


def is_quasi_static(sim: PulseSimulator, prog: PulseProgram) -> bool:
    """True when the drive-frame generator is constant away from the ramps."""
    nu = sim.drive_frame(prog)
    if sim._beat_rate(prog, nu) > 0:
        return False
    for ch in prog.channels:
        if ch.envelope_x.kind != "flat" or ch.envelope_y.kind != "flat":
            return False
        if prog.frame(ch.carrier_qubit) is not None:
            return False
    return True


def regression_generator(sim: PulseSimulator, prog: PulseProgram) -> Tuple[np.ndarray, float]:
    """
    Drive-frame generator from i log U(t) = H t + K fitted over 8 times.

    The window ends at 0.8 pi over the generator's spectral spread so that the
    logarithm stays on its principal branch.

    Returns:
        Tuple of (slope H, relative regression residual)
    """
    nu = sim.drive_frame(prog)
    spread = 2.0 * sim._norm_bound(prog, nu)
    t_max = prog.total_duration if spread == 0 else min(prog.total_duration, 0.8 * math.pi / spread)
    if t_max <= 0:
        raise DegenerateFitError("Empty fit window")
    times = t_max * np.arange(1, REGRESSION_POINTS + 1) / REGRESSION_POINTS
    logs = []
    for u in sim.propagate_series(prog, times, frame="drive"):
        g = 1j * scipy.linalg.logm(u)
        logs.append(0.5 * (g + g.conj().T))
    logs_arr = np.asarray(logs)
    design = np.stack([times, np.ones_like(times)], axis=1)
    flat = logs_arr.reshape(len(times), -1)
    solution, _, _, _ = np.linalg.lstsq(design, flat, rcond=None)
    fitted = design @ solution
    scale = float(np.linalg.norm(flat))
    residual = float(np.linalg.norm(flat - fitted) / scale) if scale > 0 else 0.0
    slope = solution[0].reshape(logs_arr.shape[1:])
    return 0.5 * (slope + slope.conj().T), residual


def _default_controls(qubits: Tuple[int, ...]) -> Tuple[int, ...]:
    if len(qubits) == 2:
        return (qubits[0],)
    return (qubits[0], qubits[2])


def _allowed(label: str, span: str, controls_local: Sequence[int]) -> bool:
    if span == "full":
        return True
    if span == "chain":
        return label in CHAIN_TERMS or set(label) == {"I"}
    return all(label[q] in "IZ" for q in controls_local)


def extract_effective_rates(
    system: SystemLike,
    prog: PulseProgram,
    qubits: Sequence[int],
    controls: Optional[Sequence[int]] = None,
    span: Optional[str] = None,
    method: str = "auto",
    max_residual: float = FIT_RESIDUAL_LIMIT,
) -> EffectiveRates:
    """
    Pauli rates of the effective qubit-frame Hamiltonian generated by a drive.

    The drive-frame generator of the qubit subspace is block diagonalized
    with respect to the Z operators of the control qubits, the frame
    detunings are removed and the result is expanded on Pauli strings.

    Args:
        system: Simulator, QubitModel or DeviceModel
        prog: Pulse program; flat pulses use the exact static generator
        qubits: (control, target) pair or a (control, target, control) triple
        controls: Qubits whose Z must be conserved, default the pair's first
            qubit or both ends of the triple
        span: ``"pair"`` (IA and ZA terms), ``"chain"`` (the seven
            three-qubit terms) or ``"full"`` (no span check)
        method: ``"static"``, ``"regression"`` or ``"auto"``
        max_residual: Largest accepted fit residual

    Returns:
        EffectiveRates with labels ordered as ``qubits``

    Raises:
        DegenerateFitError: If the fit residual exceeds ``max_residual``
    """
    sim = as_simulator(system)
    n = sim.n_qubits
    qubits = tuple(int(q) for q in qubits)
    if len(qubits) not in (2, 3) or len(set(qubits)) != len(qubits):
        raise ValidationError("Rates are extracted for a pair or a triple of distinct qubits")
    if any(not 0 <= q < n for q in qubits):
        raise ValidationError("Qubit index outside the register")
    controls = tuple(controls) if controls is not None else _default_controls(qubits)
    span = span or ("pair" if len(qubits) == 2 else "chain")
    if span not in SPANS:
        raise ValidationError(f"Unknown span: {span}")
    if method == "auto":
        method = "static" if is_quasi_static(sim, prog) else "regression"

    if method == "static":
        generator = sim.drive_frame_generator(prog)
        fit_residual = 0.0
    elif method == "regression":
        generator, fit_residual = regression_generator(sim, prog)
    else:
        raise ValidationError(f"Unknown extraction method: {method}")

    signs = z_signs(n)
    block_labels = np.zeros(2**n, dtype=int)
    for c in controls:
        block_labels = 2 * block_labels + (signs[:, c] < 0)
    h_bd, dressing = least_action_block_diagonalize(generator, block_labels)
    if dressing > DRESSING_LIMIT:
        raise DegenerateFitError(f"Control blocks too strongly mixed (dressing {dressing:.3f})")

    nu = sim.drive_frame(prog)
    detunings = sim.frame_detunings(nu)
    h_qubit = h_bd - np.diag(signs @ detunings / 2.0)

    d = 2**n
    all_coefficients: Dict[str, float] = {}
    for pauli in pauli_basis(n):
        all_coefficients[str(pauli)] = float(np.real(np.trace(pauli.operator() @ h_qubit)) / d)

    controls_local = [qubits.index(c) for c in controls if c in qubits]
    selected: Dict[str, float] = {}
    inside = 0.0
    outside = 0.0
    for label, value in all_coefficients.items():
        if any(label[q] != "I" for q in range(n) if q not in qubits):
            continue
        local = "".join(label[q] for q in qubits)
        if set(local) == {"I"}:
            selected[local] = value
            continue
        if _allowed(local, span, controls_local):
            selected[local] = value
            inside += value**2
        else:
            outside += value**2
    span_residual = math.sqrt(outside / (inside + outside)) if inside + outside > 0 else 0.0
    residual = max(fit_residual, span_residual)
    logger.debug("Rate fit residual %.3e (regression %.3e, span %.3e)", residual, fit_residual, span_residual)
    if residual > max_residual:
        raise DegenerateFitError(f"Fit residual {residual:.3f} exceeds {max_residual}")
    if span == "chain":
        selected = {k: v for k, v in selected.items() if k in CHAIN_TERMS or set(k) == {"I"}}
    return EffectiveRates(
        coefficients=selected,
        residual=residual,
        qubits=qubits,
        all_coefficients=all_coefficients,
    )


def conditional_rates(rates: EffectiveRates, control: str = "ZXI", local: str = "IXI") -> Tuple[float, float]:
    """
    Rabi rates of the target with the control in |0> and in |1>.

    Returns:
        Tuple (r0, r1) = (c_local + c_control, c_local - c_control)
    """
    a = rates.get(local)
    b = rates.get(control)
    return a + b, a - b
