"""Unit tests for the search space, GP surrogate and Bayesian optimizer."""

import json

import numpy as np
import pytest

from pulse_vqgo.errors import ValidationError
from pulse_vqgo.optimization.bayesopt import acquire, optimize
from pulse_vqgo.optimization.space import Parameter, SearchSpace
from pulse_vqgo.optimization.surrogate import expected_improvement, gp_fit


def unit_line() -> SearchSpace:
    return SearchSpace.from_bounds({"x": (0.0, 1.0)})


def quadratic(x: np.ndarray, iteration: int) -> float:
    return -float((x[0] - 0.3) ** 2)


class TestSearchSpace:
    """Test box parameter spaces."""

    def test_parameter_bounds(self) -> None:
        """Test inverted bounds raise error."""
        with pytest.raises(ValidationError, match="lower bound"):
            Parameter("phase", 1.0, 1.0)

    def test_space_validation(self) -> None:
        """Test empty spaces and duplicate names raise error."""
        with pytest.raises(ValidationError, match="at least one"):
            SearchSpace(())
        with pytest.raises(ValidationError, match="unique"):
            SearchSpace((Parameter("a", 0, 1), Parameter("a", 0, 2)))

    def test_unit_scaling(self) -> None:
        """Test mapping to and from the unit cube."""
        space = SearchSpace.from_bounds({"amp": (10.0, 30.0, "MHz"), "phase": (-1.0, 1.0)})
        assert space.dim == 2
        assert space.names == ["amp", "phase"]
        assert space.parameters[0].unit == "MHz"
        assert np.allclose(space.to_unit([20.0, 0.5]), [0.5, 0.75])
        assert np.allclose(space.from_unit([0.5, 0.75]), [20.0, 0.5])

    def test_from_unit_clips(self) -> None:
        """Test points outside the cube are clipped to the box."""
        space = unit_line()
        assert space.from_unit([1.5])[0] == 1.0
        assert space.contains(space.from_unit([-0.2]))
        assert not space.contains([1.1])

    def test_as_dict_and_to_dict(self) -> None:
        """Test named views of a point and of the box."""
        space = SearchSpace.from_bounds({"amp": (10.0, 30.0, "MHz")})
        assert space.as_dict(np.array([12.5])) == {"amp": 12.5}
        assert space.to_dict() == {"amp": [10.0, 30.0, "MHz"]}

    def test_sobol_design(self) -> None:
        """Test the scrambled design size, range and seeding."""
        space = SearchSpace.from_bounds({"a": (0, 1), "b": (0, 1)})
        points = space.sobol(5, 3)
        assert points.shape == (5, 2)
        assert np.all((points >= 0) & (points <= 1))
        assert np.array_equal(points, space.sobol(5, 3))
        assert space.sobol(0, 3).shape == (0, 2)


class TestSurrogate:
    """Test the GP surrogate and acquisition function."""

    def test_noise_free_interpolation(self) -> None:
        """Test the noise-free fit passes through its data."""
        x = np.linspace(0.0, 1.0, 8).reshape(-1, 1)
        y = np.sin(3 * x[:, 0])
        surrogate = gp_fit(x, y, noise_free=True)
        mean, std = surrogate.predict(x)
        assert np.allclose(mean, y, atol=1e-3)
        assert np.all(std < 1e-2)
        assert surrogate.n_observations == 8
        assert surrogate.best == pytest.approx(float(np.max(y)))
        assert surrogate.length_scales.shape == (1,)

    def test_fit_validation(self) -> None:
        """Test mismatched inputs raise error."""
        with pytest.raises(ValidationError, match="matching"):
            gp_fit(np.zeros((3, 1)), [1.0, 2.0])

    def test_expected_improvement_without_uncertainty(self) -> None:
        """Test EI reduces to the plain improvement at zero std."""
        ei = expected_improvement(np.array([0.5, -0.2]), np.array([0.0, 0.0]), best=0.1)
        assert np.allclose(ei, [0.4, 0.0])

    def test_expected_improvement_with_uncertainty(self) -> None:
        """Test EI stays positive below the incumbent when std is positive."""
        ei = expected_improvement(np.array([0.0]), np.array([0.5]), best=0.1)
        assert ei[0] > 0

    def test_acquire_without_surrogate(self) -> None:
        """Test the first Sobol point is returned without data."""
        x = acquire(None, unit_line(), seed=5)
        assert unit_line().contains(x)


class TestOptimize:
    """Test the budgeted optimizer."""

    def test_finds_quadratic_maximum(self) -> None:
        """Test a smooth 1D objective is maximized within the budget."""
        trace = optimize(quadratic, unit_line(), budget=15, seed=0, noise_free=True)
        assert len(trace) == 15
        phases = [r.phase for r in trace.records]
        assert phases[:4] == ["explore"] * 4
        assert set(phases[4:]) == {"bo"}
        assert trace.incumbent > -0.01

    def test_incumbent_never_decreases(self) -> None:
        """Test the incumbent history is monotone."""
        trace = optimize(quadratic, unit_line(), budget=8, seed=1, noise_free=True)
        history = trace.incumbent_history
        assert all(b >= a for a, b in zip(history, history[1:]))
        assert trace.incumbent == max(trace.values())

    def test_seeded_runs_repeat(self) -> None:
        """Test equal seeds give equal evaluation sequences."""
        a = optimize(quadratic, unit_line(), budget=7, seed=4, noise_free=True)
        b = optimize(quadratic, unit_line(), budget=7, seed=4, noise_free=True)
        assert a.values() == b.values()

    def test_noisy_objective_with_stderr(self) -> None:
        """Test (value, stderr) pairs are recorded."""

        def noisy(x: np.ndarray, iteration: int):
            return quadratic(x, iteration), 0.01

        trace = optimize(noisy, unit_line(), budget=6, seed=2)
        assert all(r.stderr == 0.01 for r in trace.records)

    def test_failed_evaluation_gets_penalty(self) -> None:
        """Test a raising objective records a penalty below the observed values."""

        def flaky(x: np.ndarray, iteration: int) -> float:
            if iteration == 2:
                raise RuntimeError("simulator diverged")
            return quadratic(x, iteration)

        trace = optimize(flaky, unit_line(), budget=4, seed=0, exploration_fraction=1.0)
        failed = trace.records[2]
        assert failed.failed
        assert failed.value <= min(trace.records[0].value, trace.records[1].value)
        assert trace.best() is not failed

    def test_non_finite_value_is_a_failure(self) -> None:
        """Test NaN values are replaced by a penalty."""
        trace = optimize(lambda x, i: float("nan"), unit_line(), budget=2, seed=0, exploration_fraction=1.0)
        assert all(r.failed for r in trace.records)
        assert trace.best() is None

    def test_trace_file(self, tmp_path) -> None:
        """Test one JSON line per evaluation."""
        path = tmp_path / "trace.jsonl"
        optimize(quadratic, unit_line(), budget=5, seed=0, trace_path=path, noise_free=True)
        lines = path.read_text().splitlines()
        assert len(lines) == 5
        assert json.loads(lines[0])["phase"] == "explore"

    def test_tick_mapping(self) -> None:
        """Test ticks follow the supplied mapping."""
        trace = optimize(
            quadratic, unit_line(), budget=3, seed=0, exploration_fraction=1.0, tick=lambda i: 10 * i
        )
        assert [r.tick for r in trace.records] == [0, 10, 20]

    def test_validation(self) -> None:
        """Test bad budgets and exploration fractions raise error."""
        with pytest.raises(ValidationError, match="budget"):
            optimize(quadratic, unit_line(), budget=0, seed=0)
        with pytest.raises(ValidationError, match="Exploration fraction"):
            optimize(quadratic, unit_line(), budget=3, seed=0, exploration_fraction=1.5)
