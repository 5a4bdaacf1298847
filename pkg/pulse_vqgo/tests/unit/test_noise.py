"""Unit tests for readout error, line distortion and drift."""

import math

import numpy as np
import pytest

from pulse_vqgo.analysis.tomography import UnitaryOracle
from pulse_vqgo.device.pulses import resonant_channel
from pulse_vqgo.errors import CalibrationError, ValidationError
from pulse_vqgo.models.device import QubitModel
from pulse_vqgo.models.pulse import DEFAULT_SAMPLE_PERIOD, PulseProgram
from pulse_vqgo.noise.distortion import LineDistortion, apply_distortion
from pulse_vqgo.noise.drift import DriftProcess, drift_step
from pulse_vqgo.noise.readout import (
    ReadoutModel,
    SampledOracle,
    calibrate_readout_to_baseline,
    identity_fidelity_under_readout,
    measured_identity_fidelity,
    readout_expectation,
    readout_from_config,
    sample_shots,
)
from pulse_vqgo.quantum.core import PauliString, product_state

Z = PauliString.from_string("Z")


def program(level: float = 1.0) -> PulseProgram:
    channel = resonant_channel("drive1", 0, amplitude=2.0, level_x=level, ramp_samples=0)
    return PulseProgram(channels=(channel,), total_duration=9 * DEFAULT_SAMPLE_PERIOD)


class TestReadoutModel:
    """Test the confusion model."""

    def test_symmetric_and_ideal(self) -> None:
        """Test factory constructors."""
        assert ReadoutModel.ideal(2).is_ideal
        model = ReadoutModel.symmetric(0.1, 3)
        assert model.n == 3
        assert model.flip_probabilities().shape == (3, 2)

    def test_probability_bounds(self) -> None:
        """Test flips of one half or more raise error."""
        with pytest.raises(ValidationError, match="outside"):
            ReadoutModel(p01=(0.5,), p10=(0.0,))
        with pytest.raises(ValidationError, match="same qubits"):
            ReadoutModel(p01=(0.1, 0.1), p10=(0.1,))

    def test_from_config(self) -> None:
        """Test building from config sequences."""
        model = readout_from_config([0.01, 0.02], [0.03, 0.04])
        assert model.to_dict() == {"p01": [0.01, 0.02], "p10": [0.03, 0.04]}


class TestReadoutSampling:
    """Test readout-attenuated expectations and shot sampling."""

    def test_expectation_of_zero_state(self) -> None:
        """Test a |0> readout flip attenuates <Z>."""
        readout = ReadoutModel(p01=(0.1,), p10=(0.0,))
        assert readout_expectation(product_state("0"), Z, readout) == pytest.approx(0.8)

    def test_expectation_of_one_state(self) -> None:
        """Test a |1> readout flip attenuates <Z>."""
        readout = ReadoutModel(p01=(0.0,), p10=(0.2,))
        assert readout_expectation(product_state("1"), Z, readout) == pytest.approx(-0.6)

    def test_expectation_in_rotated_basis(self) -> None:
        """Test symmetric error scales a two-qubit parity by (1 - 2p)^2."""
        readout = ReadoutModel.symmetric(0.05, 2)
        value = readout_expectation(product_state("++"), PauliString.from_string("XX"), readout)
        assert value == pytest.approx(0.9**2)

    def test_sample_shots_converges(self) -> None:
        """Test the shot average lies near the exact mean."""
        readout = ReadoutModel.symmetric(0.1, 1)
        estimate = sample_shots(product_state("0"), Z, 20000, readout, seed=11)
        assert estimate == pytest.approx(0.8, abs=0.02)

    def test_sample_shots_is_seeded(self) -> None:
        """Test equal seeds give equal estimates."""
        readout = ReadoutModel.symmetric(0.1, 1)
        state = product_state("+")
        assert sample_shots(state, Z, 100, readout, seed=3) == sample_shots(state, Z, 100, readout, seed=3)

    def test_sample_shots_validation(self) -> None:
        """Test bad shot counts and register sizes raise error."""
        with pytest.raises(ValidationError, match="shots"):
            sample_shots(product_state("0"), Z, 0, ReadoutModel.ideal(1), seed=0)
        with pytest.raises(ValidationError, match="different qubit counts"):
            sample_shots(product_state("0"), Z, 10, ReadoutModel.ideal(2), seed=0)

    def test_identity_observable_is_one(self) -> None:
        """Test the identity parity ignores readout."""
        readout = ReadoutModel.symmetric(0.3, 1)
        assert sample_shots(product_state("0"), PauliString.from_string("I"), 5, readout, seed=0) == 1.0

    def test_sampled_oracle_streams_differ(self) -> None:
        """Test successive calls draw fresh shots."""
        oracle = SampledOracle(UnitaryOracle(np.eye(2)), ReadoutModel.ideal(1), seed=2)
        values = [oracle.expectation(product_state("+"), Z, shots=50) for _ in range(5)]
        assert len(set(values)) > 1

    def test_sampled_oracle_exact_mode(self) -> None:
        """Test no shot budget gives the attenuated mean."""
        oracle = SampledOracle(UnitaryOracle(np.eye(2)), ReadoutModel.symmetric(0.1, 1), seed=2)
        assert oracle.expectation(product_state("0"), Z) == pytest.approx(0.8)


class TestReadoutBaseline:
    """Test the identity-gate fidelity baseline."""

    def test_closed_form_matches_tomography(self) -> None:
        """Test exact tomography of the identity under readout error."""
        readout = ReadoutModel.symmetric(0.03, 2)
        assert measured_identity_fidelity(readout) == pytest.approx(identity_fidelity_under_readout(0.03, 2))

    def test_calibration_hits_target(self) -> None:
        """Test the calibrated error reproduces the baseline."""
        readout = calibrate_readout_to_baseline(0.95, 2)
        p = readout.p01[0]
        assert p == pytest.approx(0.01688, abs=1e-4)
        assert identity_fidelity_under_readout(p, 2) == pytest.approx(0.95, abs=1e-9)

    def test_calibration_perfect_baseline(self) -> None:
        """Test a unit baseline needs no readout error."""
        assert calibrate_readout_to_baseline(1.0, 3).is_ideal

    def test_calibration_out_of_range(self) -> None:
        """Test baselines at or below one half raise error."""
        with pytest.raises(CalibrationError, match="outside"):
            calibrate_readout_to_baseline(0.5, 2)


class TestDistortion:
    """Test drive-line distortion."""

    def test_identity_distortion_returns_program(self) -> None:
        """Test an empty distortion leaves the program untouched."""
        prog = program()
        assert apply_distortion(prog, LineDistortion()) is prog

    def test_phase_offset_and_scale(self) -> None:
        """Test static offsets and amplitude scales."""
        distortion = LineDistortion(phase_offsets={"drive1": 0.3}, amplitude_scales={"drive1": 0.5})
        channel = apply_distortion(program(), distortion).channel("drive1")
        assert channel.phase == pytest.approx(0.3)
        assert channel.amplitude == pytest.approx(1.0)

    def test_low_amplitude_phase_bend(self) -> None:
        """Test the bend below the threshold."""
        distortion = LineDistortion(kappa=0.2, threshold=0.1)
        assert apply_distortion(program(0.05), distortion).channel("drive1").phase == pytest.approx(0.1)
        assert apply_distortion(program(0.5), distortion).channel("drive1").phase == pytest.approx(0.0)

    def test_combined_adds_phases(self) -> None:
        """Test extra offsets add to existing ones."""
        combined = LineDistortion(phase_offsets={"cr01": 0.1}).combined({"cr01": 0.2, "cr21": -0.1})
        assert combined.phase_offsets == pytest.approx({"cr01": 0.3, "cr21": -0.1})

    def test_validation(self) -> None:
        """Test non-positive scales and thresholds raise error."""
        with pytest.raises(ValidationError, match="Amplitude scales"):
            LineDistortion(amplitude_scales={"cr01": 0.0})
        with pytest.raises(ValidationError, match="threshold"):
            LineDistortion(threshold=0.0)


class TestDrift:
    """Test the Brownian drift process."""

    def test_path_prefix_is_consistent(self) -> None:
        """Test a longer path extends a shorter one."""
        drift = DriftProcess.from_khz(5.0, coupling_khz=1.0, phase_rad=0.01, seed=4)
        short = drift.path(3, 3, ["cr01", "cr21"])
        long = drift.path(6, 3, ["cr21", "cr01"])
        assert len(short) == 4
        assert short == long[:4]

    def test_initial_state_is_zero(self) -> None:
        """Test tick zero has no offsets."""
        state = DriftProcess.from_khz(5.0).path(2, 2)[0]
        assert state.frequency_offsets == (0.0, 0.0)
        assert state.coupling_offsets == (0.0,)

    def test_frozen_drift(self) -> None:
        """Test zero steps never move."""
        drift = DriftProcess()
        assert drift.is_frozen
        state = drift.offsets(10, 3, ["cr01"])
        assert state.frequency_offsets == (0.0, 0.0, 0.0)
        assert state.phase_offsets == {"cr01": 0.0}

    def test_from_khz_units(self) -> None:
        """Test kHz steps become rad/us."""
        drift = DriftProcess.from_khz(1.0, coupling_khz=2.0)
        assert drift.frequency_step == pytest.approx(2 * math.pi * 1e-3)
        assert drift.coupling_step == pytest.approx(4 * math.pi * 1e-3)

    def test_validation(self) -> None:
        """Test negative steps, ticks and tick durations raise error."""
        with pytest.raises(ValidationError, match="non-negative"):
            DriftProcess(frequency_step=-1.0)
        with pytest.raises(ValidationError, match="Tick duration"):
            DriftProcess(tick_duration=0.0)
        with pytest.raises(ValidationError, match="ticks"):
            DriftProcess().path(-1, 2)

    def test_line_phase_independent_of_other_channels(self) -> None:
        """Test a line drifts the same whichever other channels share the program."""
        drift = DriftProcess(phase_step=0.05, seed=3)
        alone = drift.offsets(10, 3, ["cr01", "drive1"])
        crowded = drift.offsets(10, 3, ["central1", "comp1", "cr01", "cr21", "drive1"])
        assert alone.phase_offsets["cr01"] == crowded.phase_offsets["cr01"]
        assert alone.phase_offsets["drive1"] == crowded.phase_offsets["drive1"]
        assert alone.phase_offsets["cr01"] != alone.phase_offsets["drive1"]
        assert alone.frequency_offsets == crowded.frequency_offsets

    def test_drift_step_perturbs_model(self) -> None:
        """Test drift moves the frequencies by the path offsets."""
        model = QubitModel(n=2, qubit_freq=(100.0, 90.0), coupling=(1.0,))
        drift = DriftProcess.from_khz(50.0, seed=1)
        drifted, phases = drift_step(model, drift, 5, ["cr01"])
        state = drift.offsets(5, 2, ["cr01"])
        assert drifted.qubit_freq[0] == pytest.approx(100.0 + state.frequency_offsets[0])
        assert phases == {"cr01": 0.0}

    def test_drift_step_without_ticks(self) -> None:
        """Test zero ticks keeps the model."""
        model = QubitModel(n=1, qubit_freq=(100.0,), coupling=())
        drifted, _ = drift_step(model, DriftProcess.from_khz(50.0), 0)
        assert drifted is model
