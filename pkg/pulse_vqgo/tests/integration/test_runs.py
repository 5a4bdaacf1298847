"""End-to-end scenario runs on the qubit tier."""

import json

import pytest

from pulse_vqgo.config import Config
from pulse_vqgo.errors import ReplayMismatchError
from pulse_vqgo.models.trace import OptimizationTrace
from pulse_vqgo.scenarios.baselines import run_reduced_scatter
from pulse_vqgo.scenarios.context import RunContext
from pulse_vqgo.scenarios.runner import replay, run_scenario

pytestmark = pytest.mark.slow


def qubit_config(tmp_path) -> Config:
    config = Config()
    config.qubit_freq_mhz = (5500.0, 5300.0, 5450.0)
    config.set_seed(1)
    config.set_output_dir(str(tmp_path))
    return config


class TestPhaseCalibration:
    """Test the CR phase calibration against an injected line offset."""

    def test_recovers_line_offset(self, tmp_path) -> None:
        """Test the calibrated phase undoes the offset modulo pi."""
        config = qubit_config(tmp_path)
        config.phase_offsets = {"cr01": 0.3}
        result = run_scenario(config, "phase-calibration")
        assert result.metrics["line_offset"] == pytest.approx(0.3)
        assert result.metrics["offset_error"] < 0.05
        assert len(result.trace) >= 1


class TestZXGate:
    """Test a short exact-fidelity ZX optimization."""

    def test_small_budget_run(self, tmp_path) -> None:
        """Test the run writes its artifacts and a bounded fidelity."""
        config = qubit_config(tmp_path)
        config.figure_of_merit = "exact"
        config.budget = 6
        result = run_scenario(config, "zx-gate")
        assert len(result.trace) == 6
        assert 0.0 <= result.fidelity <= 1.0 + 1e-9
        assert {"prescan.csv", "trace.jsonl", "zx.chi.txt", "envelopes.csv", "run.json", "config.ini"} <= set(
            result.artifacts
        )
        run_dir = tmp_path / "zx-gate-seed1"
        assert len(OptimizationTrace.from_jsonl(run_dir / "trace.jsonl")) == 6
        recorded = json.loads((run_dir / "run.json").read_text())
        assert recorded["seed"] == 1
        assert recorded["result"]["evaluations"] == 6


class TestTomographyExperiments:
    """Test the tomography-only experiments."""

    def test_identity_baseline(self, tmp_path) -> None:
        """Test the calibrated readout reproduces the two-qubit baseline."""
        config = qubit_config(tmp_path)
        config.identity_baseline = 0.95
        result = run_scenario(config, "identity-baseline")
        assert result.metrics["identity_fidelity_2q"] == pytest.approx(0.95, abs=1e-6)
        assert result.metrics["identity_fidelity_3q"] == pytest.approx(result.metrics["closed_form_3q"], abs=1e-6)
        assert result.metrics["identity_fidelity_3q"] < 0.95
        run_dir = tmp_path / "identity-baseline-seed1"
        recorded = json.loads((run_dir / "run.json").read_text())
        assert len(recorded["noise"]["readout"]["p01"]) == 3
        assert "# seed=1" in (run_dir / "identity-3.chi.txt").read_text().splitlines()

    def test_reduced_scatter(self, tmp_path) -> None:
        """Test the noiseless reduced overlap equals the process fidelity in the span."""
        config = qubit_config(tmp_path)
        config.tomography_shots = 2000
        ctx = RunContext(config, "reduced-scatter")
        run_reduced_scatter(ctx, count=5)
        assert ctx.result.metrics["max_noiseless_deviation"] < 1e-6
        assert ctx.result.metrics["mean_noisy_deviation"] < 0.1
        assert (ctx.run_dir / "scatter.csv").exists()


class TestReplay:
    """Test bit-exact replay of a recorded run."""

    def record(self, tmp_path):
        config = qubit_config(tmp_path)
        config.identity_baseline = 0.95
        config.tomography_shots = 300
        run_scenario(config, "identity-baseline")
        return tmp_path / "identity-baseline-seed1"

    def test_round_trip(self, tmp_path) -> None:
        """Test a replay reproduces every recorded artifact."""
        run_dir = self.record(tmp_path)
        artifacts = replay(run_dir)
        assert set(artifacts) == {"config.ini", "identity-2.chi.txt", "identity-3.chi.txt"}

    def test_tampered_artifact(self, tmp_path) -> None:
        """Test an edited artifact is reported."""
        run_dir = self.record(tmp_path)
        chi = run_dir / "identity-2.chi.txt"
        chi.write_text(chi.read_text() + "II II 0.5 0\n")
        with pytest.raises(ReplayMismatchError, match="identity-2.chi.txt"):
            replay(run_dir)
