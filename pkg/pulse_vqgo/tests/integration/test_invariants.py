"""Numerical invariants of the propagators, estimators and staged scenarios."""

import math
from unittest.mock import patch

import numpy as np
import pytest

from pulse_vqgo.analysis.tomography import UnitaryOracle, chi_from_unitary
from pulse_vqgo.analysis.zero_fidelity import build_plan, zero_fidelity_estimate, zero_fidelity_exact
from pulse_vqgo.config import Config
from pulse_vqgo.quantum.core import PAULI_MATRICES, pauli_exponential, propagate_piecewise
from pulse_vqgo.scenarios.calibration import prescan_cr_amplitude
from pulse_vqgo.scenarios.programs import build_simulator, zx_program
from pulse_vqgo.scenarios.runner import run_scenario

pytestmark = pytest.mark.slow

TWO_PI = 2 * math.pi


def qubit_tier(tmp_path) -> Config:
    config = Config()
    config.tier = "qubit"
    config.figure_of_merit = "exact"
    config.set_seed(2)
    config.set_output_dir(str(tmp_path))
    return config


class TestPiecewisePropagation:
    """Test the midpoint rule converges at second order."""

    def test_error_quarters_when_step_halves(self) -> None:
        """Test halving dt cuts the error by four."""
        x, z = PAULI_MATRICES["X"], PAULI_MATRICES["Z"]

        def h(t: float) -> np.ndarray:
            return math.cos(3 * t) * x + t * z

        reference = propagate_piecewise(h, 0.0, 1.0, 1e-4)
        errors = [np.linalg.norm(propagate_piecewise(h, 0.0, 1.0, dt) - reference, 2) for dt in (0.04, 0.02, 0.01)]
        for coarse, fine in zip(errors, errors[1:]):
            assert 3.5 < coarse / fine < 4.5


class TestZeroFidelityStatistics:
    """Test the importance-sampled estimator over many plan draws."""

    target = pauli_exponential("ZX", math.pi / 4)

    def estimates(self, angle: float, draws: int = 200, samples: int = 10) -> np.ndarray:
        oracle = UnitaryOracle(self.target @ pauli_exponential("IX", angle))
        return np.array(
            [zero_fidelity_estimate(build_plan(self.target, samples, seed), oracle)[0] for seed in range(draws)]
        )

    def test_unbiased(self) -> None:
        """Test the mean over plans matches the exhaustive sum."""
        oracle = UnitaryOracle(self.target @ pauli_exponential("IX", 0.3))
        exact = zero_fidelity_exact(self.target, oracle)
        values = self.estimates(0.3)
        assert abs(values.mean() - exact) < 5 * values.std(ddof=1) / math.sqrt(len(values))

    def test_variance_falls_towards_unit_fidelity(self) -> None:
        """Test gates closer to the target give a tighter spread."""
        assert np.var(self.estimates(0.1)) < np.var(self.estimates(0.4))

    def test_exact_gate_has_no_spread(self) -> None:
        """Test every sample of a perfect gate equals one."""
        assert np.allclose(self.estimates(0.0, draws=5), 1.0)


class TestTierAgreement:
    """Test the two-level reduction against the full transmon chain."""

    def test_zx_pulse_chi_agrees(self) -> None:
        """Test the computational-subspace chi of a CR pulse agrees within 0.02."""
        config = Config()
        prog = zx_program(config, config.angular(config.cr_amplitude_mhz[0]))
        config.tier = "qubit"
        u_qubit = build_simulator(config, (0, 1)).propagate(prog)
        config.tier = "transmon"
        u_transmon = build_simulator(config, (0, 1)).propagate(prog)
        difference = chi_from_unitary(u_qubit).chi - chi_from_unitary(u_transmon).chi
        assert np.max(np.abs(difference)) < 0.02


class TestCalibrationScenarios:
    """Test the CR pre-scan and the compensating drive."""

    def test_prescan_stays_within_one_rabi_oscillation(self, tmp_path) -> None:
        """Test the chosen amplitude is the largest with a Rabi angle of at most pi/2."""
        config = qubit_tier(tmp_path)
        table, amplitude = prescan_cr_amplitude(
            build_simulator(config, (0, 1)),
            lambda a: zx_program(config, a),
            (0, 1),
            "ZX",
            config.angular(config.cr_max_amplitude_mhz),
        )
        assert len(table) == 16
        assert table["amplitude_mhz"].is_monotonic_increasing
        allowed = table[table["rabi_angle"] <= math.pi / 2]
        assert amplitude / TWO_PI == pytest.approx(allowed["amplitude_mhz"].max())

    def test_omega_c_cancels_central_rate(self, tmp_path) -> None:
        """Test the calibrated drive leaves no 1X1 rate and equal conditional Rabi rates."""
        result = run_scenario(qubit_tier(tmp_path), "omega-c-calibration")
        metrics = result.metrics
        assert metrics["residual_1x1_ratio"] < 0.02
        assert abs(metrics["r0_mhz"]) == pytest.approx(abs(metrics["r1_mhz"]), rel=0.04)

    def test_omega_c_belongs_to_reported_amplitudes(self, tmp_path) -> None:
        """Test Omega_c still cancels 1X1 when the rate matching stops after one pass."""
        with patch("pulse_vqgo.scenarios.calibration.MATCH_ITERATIONS", 1):
            result = run_scenario(qubit_tier(tmp_path), "omega-c-calibration")
        assert result.metrics["residual_1x1_ratio"] < 0.02


class TestStagedScenarios:
    """Test the three-qubit gate scenarios end to end."""

    def test_zx1_1yz_stage_audit(self, tmp_path) -> None:
        """Test the stage-2 correction degrades each block by at most its rotation angle."""
        config = qubit_tier(tmp_path)
        config.budget = 16
        result = run_scenario(config, "zx1-1yz-gate")
        assert len(result.trace) == 8
        assert min(result.metrics["block_fidelity"].values()) >= 0.8
        audit = result.metrics["stage_audit"]
        assert [row["block"] for row in audit] == ["zx", "yz"]
        for row in audit:
            assert row["degradation"] <= row["correction_angle"] + 1e-9
        assert "zx1-1yz.chi.txt" in result.artifacts

    def test_floquet_stroboscopic_population(self, tmp_path) -> None:
        """Test P(---) after three periods matches sin^2(6 pi / 25) within 0.05."""
        config = qubit_tier(tmp_path)
        config.budget = 4
        result = run_scenario(config, "floquet-zyz")
        oracle = math.sin(6 * math.pi / 25) ** 2
        assert result.metrics["oracle_p_minus"] == pytest.approx(oracle)
        marks = result.metrics["stroboscopic_p_minus"]
        assert marks[3] == pytest.approx(oracle, abs=0.05)
        assert len(result.trace) == 4

    def test_drift_study(self, tmp_path) -> None:
        """Test a frozen device reproduces its chi and a drifting one moves away."""
        frozen = qubit_tier(tmp_path / "frozen")
        frozen.drift_ticks = 4
        report = run_scenario(frozen, "drift-study").metrics
        assert report["floquet"]["mutual_overlap"] == pytest.approx(1.0, abs=1e-9)
        assert report["zx"]["mutual_overlap"] == pytest.approx(1.0, abs=1e-9)

        drifting = qubit_tier(tmp_path / "drifting")
        drifting.drift_ticks = 4
        drifting.drift_frequency_khz = 50.0
        drifting.drift_phase_rad = 0.05
        report = run_scenario(drifting, "drift-study").metrics
        for label in ("floquet", "zx"):
            assert 0.0 < report[label]["mutual_overlap"] < 1.0 - 1e-6
        assert report["elapsed_seconds"] == pytest.approx(4 * 60.0)
