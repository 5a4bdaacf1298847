"""Scenario definitions, calibration results and run summaries."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..errors import ConfigurationError
from ..optimization.space import SearchSpace
from ..quantum.core import is_unitary, pauli_basis
from .process import REDUCED_LABELS, ProcessMatrix
from .trace import OptimizationTrace, utc_timestamp

FIGURES_OF_MERIT = ("reduced-chi", "zero-fidelity", "exact")


def in_reduced_span(u: np.ndarray, atol: float = 1e-9) -> bool:
    """True when a two-qubit unitary is a combination of II, ZI, IX and ZX."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        return False
    for pauli in pauli_basis(2):
        if str(pauli) in REDUCED_LABELS:
            continue
        if abs(np.trace(pauli.operator() @ u)) / 4 > atol:
            return False
    return True


@dataclass(frozen=True, eq=False)
class Scenario:
    """An optimization experiment: target gate, search box and figure of merit."""

    name: str
    target: np.ndarray = field(repr=False)
    space: SearchSpace
    figure_of_merit: str = "exact"
    budget: int = 100
    shots: int = 0

    def __post_init__(self) -> None:
        if self.figure_of_merit not in FIGURES_OF_MERIT:
            raise ConfigurationError(f"Unknown figure of merit '{self.figure_of_merit}'")
        if not is_unitary(np.asarray(self.target, dtype=complex), atol=1e-8):
            raise ConfigurationError(f"Scenario {self.name} target is not unitary")
        if self.figure_of_merit == "reduced-chi" and not in_reduced_span(self.target):
            raise ConfigurationError(
                f"reduced-chi figure of merit is not valid for the {self.name} target"
            )
        if self.budget < 1:
            raise ConfigurationError("Scenario budget must be at least 1")
        if self.shots < 0:
            raise ConfigurationError("Shot count cannot be negative")

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(self.target.shape[0])))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "figure_of_merit": self.figure_of_merit,
            "budget": self.budget,
            "shots": self.shots,
            "space": self.space.to_dict(),
        }


@dataclass
class CalibrationResult:
    """Calibrated quantities of one procedure together with their residuals."""

    name: str
    values: Dict[str, float] = field(default_factory=dict)
    residuals: Dict[str, float] = field(default_factory=dict)
    threshold: float = math.inf
    started: str = field(default_factory=utc_timestamp)
    finished: str = ""
    failed: bool = False
    reason: str = ""

    def __post_init__(self) -> None:
        worst = max(self.residuals.values(), default=0.0)
        if not self.failed and worst > self.threshold:
            self.mark_failed(f"residual {worst:.4g} above {self.threshold:.4g}")
        if not self.finished:
            self.finished = utc_timestamp()

    def mark_failed(self, reason: str) -> None:
        """Mark the calibration as failed with a reason."""
        self.failed = True
        self.reason = reason

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "values": dict(self.values),
            "residuals": dict(self.residuals),
            "threshold": None if math.isinf(self.threshold) else self.threshold,
            "started": self.started,
            "finished": self.finished,
            "failed": self.failed,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CalibrationResult":
        threshold = data.get("threshold")
        return cls(
            name=str(data["name"]),
            values={k: float(v) for k, v in data.get("values", {}).items()},
            residuals={k: float(v) for k, v in data.get("residuals", {}).items()},
            threshold=math.inf if threshold is None else float(threshold),
            started=str(data.get("started", "")),
            finished=str(data.get("finished", "")),
            failed=bool(data.get("failed", False)),
            reason=str(data.get("reason", "")),
        )

    def __str__(self) -> str:
        status = f"FAILED ({self.reason})" if self.failed else "ok"
        values = ", ".join(f"{k}={v:.6g}" for k, v in self.values.items())
        return f"{self.name}: {values} [{status}]"


@dataclass
class ScenarioResult:
    """Everything one scenario run produced."""

    scenario: str
    trace: Optional[OptimizationTrace] = None
    chi: Optional[ProcessMatrix] = None
    fidelity: Optional[float] = None
    metrics: Dict[str, Any] = field(default_factory=dict)
    calibrations: List[CalibrationResult] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)

    def add_artifact(self, name: str) -> None:
        if name not in self.artifacts:
            self.artifacts.append(name)

    def summary(self) -> Dict[str, Any]:
        """JSON-ready summary for run.json."""
        return {
            "scenario": self.scenario,
            "fidelity": self.fidelity,
            "incumbent": None if self.trace is None or not len(self.trace) else self.trace.incumbent,
            "evaluations": 0 if self.trace is None else len(self.trace),
            "metrics": self.metrics,
            "calibrations": [c.to_dict() for c in self.calibrations],
            "artifacts": sorted(self.artifacts),
        }

    def __str__(self) -> str:
        fidelity = "n/a" if self.fidelity is None else f"{self.fidelity:.4f}"
        return f"ScenarioResult({self.scenario}, fidelity={fidelity})"
