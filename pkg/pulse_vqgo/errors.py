"""Exception hierarchy shared by every pulse_vqgo layer."""


class VQGOError(Exception):
    """Base exception for simulator and optimizer errors."""

    category = "internal"
    exit_code = 1


class ValidationError(VQGOError, ValueError):
    """Raised when arguments to a library function are malformed."""

    category = "validation"
    exit_code = 9


class ConfigurationError(VQGOError):
    """Raised when a configuration file or scenario definition is invalid."""

    category = "configuration"
    exit_code = 2


class CalibrationError(VQGOError):
    """Raised when a calibration cannot reach its target."""

    category = "calibration"
    exit_code = 3


class DegenerateFitError(VQGOError):
    """Raised when dynamics leave the assumed effective-Hamiltonian span."""

    category = "degenerate-fit"
    exit_code = 4


class LeakageError(VQGOError):
    """Raised when population escapes the computational subspace."""

    category = "leakage"
    exit_code = 5


class ConditioningError(VQGOError):
    """Raised when the surrogate covariance stays ill-conditioned."""

    category = "conditioning"
    exit_code = 6


class OptimizationAbortedError(VQGOError):
    """Raised when a staged optimization cannot continue."""

    category = "aborted"
    exit_code = 7


class ReplayMismatchError(VQGOError):
    """Raised when a replayed run does not reproduce its artifacts."""

    category = "replay-mismatch"
    exit_code = 8


__all__ = [
    "VQGOError",
    "ValidationError",
    "ConfigurationError",
    "CalibrationError",
    "DegenerateFitError",
    "LeakageError",
    "ConditioningError",
    "OptimizationAbortedError",
    "ReplayMismatchError",
]
