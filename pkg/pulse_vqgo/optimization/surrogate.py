"""Gaussian-process surrogate and expected improvement."""

import logging
import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm
from sklearn.exceptions import ConvergenceWarning
from sklearn.gaussian_process import GaussianProcessRegressor
from sklearn.gaussian_process.kernels import ConstantKernel, Matern, WhiteKernel

from ..errors import ConditioningError, ValidationError

logger = logging.getLogger(__name__)

JITTER_START = 1e-10
JITTER_LIMIT = 1e-4
STD_FLOOR = 1e-9


class GpSurrogate:
    """Fitted GP over unit-cube inputs with a Matern-5/2 ARD kernel."""

    def __init__(self, regressor: GaussianProcessRegressor, x: np.ndarray, y: np.ndarray, jitter: float) -> None:
        self.regressor = regressor
        self.x = x
        self.y = y
        self.jitter = jitter

    @property
    def n_observations(self) -> int:
        return len(self.y)

    @property
    def best(self) -> float:
        return float(np.max(self.y))

    @property
    def length_scales(self) -> np.ndarray:
        matern = [k for k in _leaf_kernels(self.regressor.kernel_) if isinstance(k, Matern)]
        return np.atleast_1d(matern[0].length_scale) if matern else np.array([])

    def predict(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Posterior mean and standard deviation at unit-cube points."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        mean, std = self.regressor.predict(x, return_std=True)
        return mean, np.maximum(std, 0.0)


def _leaf_kernels(kernel):
    if hasattr(kernel, "k1") and hasattr(kernel, "k2"):
        return _leaf_kernels(kernel.k1) + _leaf_kernels(kernel.k2)
    return [kernel]


def make_kernel(dim: int, noise_free: bool):
    kernel = ConstantKernel(1.0, (1e-3, 1e3)) * Matern(
        length_scale=np.full(dim, 0.3), length_scale_bounds=(1e-2, 1e2), nu=2.5
    )
    if not noise_free:
        kernel = kernel + WhiteKernel(noise_level=1e-4, noise_level_bounds=(1e-10, 1e-1))
    return kernel


def gp_fit(
    x: np.ndarray,
    y: Sequence[float],
    stderr: Optional[Sequence[float]] = None,
    noise_free: bool = False,
    seed: int = 0,
    n_restarts: int = 4,
) -> GpSurrogate:
    """
    Fit a GP surrogate by marginal-likelihood maximization.

    Args:
        x: Observed points in the unit cube, shape (k, d)
        y: Observed values
        stderr: Per-point standard errors, used as observation noise
        noise_free: Pin the noise variance to the jitter for exact interpolation
        seed: Seed of the optimizer restarts
        n_restarts: Extra hyperparameter optimizer starts

    Returns:
        Fitted GpSurrogate

    Raises:
        ConditioningError: If the covariance stays singular after jitter escalation
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    if len(y) < 1 or x.shape[0] != len(y):
        raise ValidationError("gp_fit needs matching, non-empty observations")
    scale = float(np.std(y)) or 1.0
    noise = np.zeros(len(y)) if stderr is None else (np.asarray(stderr, dtype=float) / scale) ** 2

    jitter = JITTER_START
    while jitter <= JITTER_LIMIT:
        regressor = GaussianProcessRegressor(
            kernel=make_kernel(x.shape[1], noise_free),
            alpha=noise + jitter,
            normalize_y=True,
            n_restarts_optimizer=n_restarts,
            random_state=seed,
        )
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConvergenceWarning)
                regressor.fit(x, y)
            return GpSurrogate(regressor, x, y, jitter)
        except (np.linalg.LinAlgError, ValueError) as e:
            logger.debug("GP fit failed at jitter %.0e: %s", jitter, e)
            jitter *= 10
    raise ConditioningError(f"GP covariance not positive definite with jitter up to {JITTER_LIMIT:.0e}")


def expected_improvement(
    mean: np.ndarray, std: np.ndarray, best: float, xi: float = 0.0
) -> np.ndarray:
    """EI for maximization; non-negative, and equal to max(mean - best, 0) where std vanishes."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    improvement = mean - best - xi
    safe = np.where(std > STD_FLOOR, std, 1.0)
    z = improvement / safe
    ei = improvement * norm.cdf(z) + safe * norm.pdf(z)
    ei = np.where(std > STD_FLOOR, ei, np.maximum(improvement, 0.0))
    return np.maximum(ei, 0.0)
