"""Unit tests for data models."""

import json
import math

import numpy as np
import pytest

from pulse_vqgo.errors import ConfigurationError, ValidationError
from pulse_vqgo.models.device import DeviceModel, QubitModel, angular_to_mhz, mhz_to_angular
from pulse_vqgo.models.process import (
    EffectiveRates,
    ProcessMatrix,
    ReducedChi,
    ZeroFidelityPlan,
    ZeroFidelitySample,
    normalize_label,
)
from pulse_vqgo.models.pulse import DriveChannel, Envelope, PulseProgram, VirtualZ
from pulse_vqgo.models.scenario import CalibrationResult, Scenario, ScenarioResult, in_reduced_span
from pulse_vqgo.models.trace import OptimizationTrace, TraceRecord, TraceWriter
from pulse_vqgo.optimization.space import SearchSpace
from pulse_vqgo.quantum.core import pauli_exponential

PERIOD = 2.0e-3 / 9.0


def record(iteration: int, value: float, incumbent: float, failed: bool = False) -> TraceRecord:
    return TraceRecord(
        iteration=iteration,
        params={"x": 0.1 * iteration},
        value=value,
        stderr=0.0,
        tick=iteration,
        incumbent=incumbent,
        phase="explore",
        failed=failed,
    )


class TestDeviceModel:
    """Test DeviceModel and QubitModel."""

    def test_unit_conversion(self) -> None:
        """Test MHz and rad/us conversions invert each other."""
        assert angular_to_mhz(mhz_to_angular([5.0, 1.5])) == pytest.approx((5.0, 1.5))

    def test_from_dict(self) -> None:
        """Test creating a device from MHz data."""
        device = DeviceModel.from_dict(
            {"omega_h_mhz": [5000, 5200], "epsilon": [0.2, 0.2], "coupling_mhz": [2.0], "global_truncation": 16}
        )
        assert device.n == 2
        assert device.coupling[0] == pytest.approx(2 * math.pi * 2.0)
        assert device.global_truncation == 16

    def test_coupling_count_validation(self) -> None:
        """Test wrong coupling count raises error."""
        with pytest.raises(ValidationError, match="Expected 1 couplings"):
            DeviceModel(n=2, omega_h=(1.0, 2.0), epsilon=(0.2, 0.2), coupling=())

    def test_epsilon_must_be_positive(self) -> None:
        """Test non-positive anharmonicity raises error."""
        with pytest.raises(ValidationError, match="positive"):
            DeviceModel(n=1, omega_h=(1.0,), epsilon=(0.0,), coupling=())

    def test_with_levels_caps_truncation(self) -> None:
        """Test reducing the level count caps the global truncation."""
        device = DeviceModel(n=3, omega_h=(1.0, 2.0, 3.0), epsilon=(0.2,) * 3, coupling=(0.1, 0.1))
        smaller = device.with_levels(2)
        assert smaller.levels_per_transmon == 2
        assert smaller.global_truncation == 8

    def test_qubit_model_validation(self) -> None:
        """Test qubit model length checks."""
        with pytest.raises(ValidationError, match="one entry per qubit"):
            QubitModel(n=2, qubit_freq=(1.0,), coupling=(0.1,))

    def test_dispersive_ratio(self) -> None:
        """Test the worst coupling-to-detuning ratio."""
        model = QubitModel(n=3, qubit_freq=(10.0, 8.0, 9.0), coupling=(0.1, 0.2))
        assert model.dispersive_ratio() == pytest.approx(0.2)

    def test_perturbed(self) -> None:
        """Test parameter offsets are added."""
        model = QubitModel(n=2, qubit_freq=(10.0, 8.0), coupling=(0.1,))
        moved = model.perturbed([0.5, -0.5], [0.01])
        assert moved.qubit_freq == pytest.approx((10.5, 7.5))
        assert moved.coupling == pytest.approx((0.11,))
        assert model.qubit_freq == (10.0, 8.0)


class TestPulseModels:
    """Test envelopes, channels and programs."""

    def test_flat_envelope(self) -> None:
        """Test flat envelope values."""
        env = Envelope.flat(0.4)
        assert np.allclose(env.evaluate(np.array([0.0, 1.0])), 0.4)
        assert not env.is_zero()
        assert Envelope.flat(0.0).is_zero()

    def test_flat_envelope_level_bound(self) -> None:
        """Test levels outside [-1, 1] raise error."""
        with pytest.raises(ValidationError, match="Flat envelope level"):
            Envelope.flat(1.5)

    def test_floquet_envelope(self) -> None:
        """Test the Fourier series envelope."""
        env = Envelope(kind="floquet", weights=(0.2, 0.3, 0.5), frequency=2 * math.pi)
        assert env.evaluate(np.array([0.0]))[0] == pytest.approx(1.0)
        assert env.evaluate(np.array([0.5]))[0] == pytest.approx(0.2 - 0.3 + 0.5)

    def test_floquet_weights_bound(self) -> None:
        """Test Floquet weights whose sum exceeds one raise error."""
        with pytest.raises(ValidationError, match="inside"):
            Envelope(kind="floquet", weights=(0.8, 0.8), frequency=1.0)

    def test_sampled_envelope_holds_values(self) -> None:
        """Test sampled envelopes hold each value for one period."""
        env = Envelope(kind="samples", samples=(0.1, -0.2, 0.3))
        values = env.evaluate(np.array([0.5, 1.5, 2.5, 9.0]), sample_period=1.0)
        assert np.allclose(values, [0.1, -0.2, 0.3, 0.3])

    def test_unknown_envelope_kind(self) -> None:
        """Test unknown kinds raise error."""
        with pytest.raises(ValidationError, match="Unknown envelope kind"):
            Envelope(kind="gaussian")

    def test_virtual_z_linear_ramp(self) -> None:
        """Test the default frame angle ramps linearly."""
        vz = VirtualZ(0, 1.0)
        assert vz.angle_at(np.array([0.0, 0.5, 1.0]), 1.0) == pytest.approx([0.0, 0.5, 1.0])
        assert vz.final_angle() == 1.0

    def test_virtual_z_knots(self) -> None:
        """Test piecewise-linear frame angles through knots."""
        vz = VirtualZ(1, knots=((0.0, 0.0), (0.5, 2.0), (1.0, 2.0)))
        assert vz.angle_at(np.array([0.5, 1.5]), 2.0) == pytest.approx([1.0, 2.0])
        assert vz.final_angle() == 2.0

    def test_channel_ramp_shape(self) -> None:
        """Test the Gaussian ramp rises to one and starts at exp(-2)."""
        ch = DriveChannel("cr01", 0, 1, 1.0, ramp_samples=10)
        duration = 1000 * PERIOD
        values = ch.ramp(np.array([0.0, 0.5 * duration, duration]), duration, PERIOD)
        assert values[0] == pytest.approx(math.exp(-2.0))
        assert values[1] == pytest.approx(1.0)
        assert values[2] == pytest.approx(math.exp(-2.0))

    def test_channel_validation(self) -> None:
        """Test negative amplitude raises error."""
        with pytest.raises(ValidationError, match="non-negative"):
            DriveChannel("d", 0, 0, -1.0)

    def test_channel_complex_envelope_and_peak(self) -> None:
        """Test quadrature combination and the peak over samples."""
        ch = DriveChannel("d", 0, 0, 1.0, envelope_x=Envelope.flat(0.3), envelope_y=Envelope.flat(0.4))
        env = ch.complex_envelope(np.array([0.0]), 10 * PERIOD, PERIOD)
        assert env[0] == pytest.approx(0.3 - 0.4j)
        assert ch.peak_envelope(10 * PERIOD, PERIOD) == pytest.approx(0.5)

    def test_channel_dict_round_trip(self) -> None:
        """Test channels rebuild from their dictionary form."""
        ch = DriveChannel("cr01", 0, 1, 2.5, phase=0.3, envelope_x=Envelope.flat(0.7), ramp_samples=4)
        rebuilt = DriveChannel.from_dict(ch.to_dict())
        assert rebuilt.to_dict() == ch.to_dict()
        assert rebuilt.is_cross_resonant

    def test_program_duration_must_fit_samples(self) -> None:
        """Test durations must be whole numbers of samples."""
        with pytest.raises(ValidationError, match="divide"):
            PulseProgram(channels=(), total_duration=1.5 * PERIOD, sample_period=PERIOD)

    def test_program_unique_names(self) -> None:
        """Test duplicate channel names raise error."""
        ch = DriveChannel("d", 0, 0, 1.0)
        with pytest.raises(ValidationError, match="unique"):
            PulseProgram(channels=(ch, ch), total_duration=10 * PERIOD, sample_period=PERIOD)

    def test_program_one_frame_per_qubit(self) -> None:
        """Test two frames on one qubit raise error."""
        with pytest.raises(ValidationError, match="one virtual-Z frame"):
            PulseProgram(
                channels=(),
                total_duration=10 * PERIOD,
                sample_period=PERIOD,
                virtual_z=(VirtualZ(0, 1.0), VirtualZ(0, 2.0)),
            )

    def test_program_accessors(self) -> None:
        """Test channel lookup, frames and sample counts."""
        prog = PulseProgram(
            channels=(DriveChannel("cr01", 0, 1, 1.0), DriveChannel("drive1", 1, 1, 0.5)),
            total_duration=20 * PERIOD,
            sample_period=PERIOD,
            virtual_z=(VirtualZ(0, 0.8),),
        )
        assert prog.n_samples == 20
        assert len(prog.sample_boundaries()) == 21
        assert prog.channel("drive1").amplitude == 0.5
        assert prog.frame(1) is None
        assert np.all(prog.frame_angle(1, np.array([0.0, prog.total_duration])) == 0.0)
        assert prog.final_frame_angles(2) == pytest.approx([0.8, 0.0])
        assert prog.addressed_qubits() == [0, 1]
        with pytest.raises(ValidationError, match="No channel named"):
            prog.channel("missing")

    def test_program_replace_channel(self) -> None:
        """Test replacing a channel field keeps the others."""
        prog = PulseProgram(channels=(DriveChannel("d", 0, 0, 1.0),), total_duration=10 * PERIOD, sample_period=PERIOD)
        changed = prog.replace_channel("d", phase=0.4)
        assert changed.channel("d").phase == 0.4
        assert prog.channel("d").phase == 0.0
        with pytest.raises(ValidationError):
            prog.replace_channel("other", phase=0.1)


class TestProcessModels:
    """Test process-matrix and rate models."""

    def test_normalize_label(self) -> None:
        """Test identity aliases are normalized."""
        assert normalize_label("1X1") == "IXI"
        assert normalize_label("zx") == "ZX"

    def test_process_matrix_shape_validation(self) -> None:
        """Test wrongly sized chi raises error."""
        with pytest.raises(ValidationError, match="16x16"):
            ProcessMatrix(n=2, chi=np.zeros((4, 4)))

    def test_process_matrix_element_and_trace(self) -> None:
        """Test element access by label."""
        chi = np.zeros((16, 16), dtype=complex)
        chi[0, 0] = 0.75
        chi[15, 15] = 0.25
        matrix = ProcessMatrix(n=2, chi=chi)
        assert matrix.element("II", "II") == 0.75
        assert matrix.element("ZZ", "ZZ") == 0.25
        assert matrix.trace == pytest.approx(1.0)
        assert matrix.is_hermitian()

    def test_process_matrix_dict_round_trip(self) -> None:
        """Test the JSON-ready form restores the matrix."""
        chi = np.outer([1, 1j, 0, 0], [1, -1j, 0, 0]) / 2
        matrix = ProcessMatrix(n=1, chi=chi)
        restored = ProcessMatrix.from_dict(json.loads(json.dumps(matrix.to_dict())))
        assert restored.max_distance(matrix) == 0.0

    def test_reduced_chi_shape(self) -> None:
        """Test reduced chi must be 4x4."""
        with pytest.raises(ValidationError):
            ReducedChi(matrix=np.zeros((3, 3)))
        assert ReducedChi(matrix=np.eye(4) / 4).element("ZX", "ZX") == 0.25

    def test_effective_rates(self) -> None:
        """Test rate lookup, dominance and unit conversion."""
        rates = EffectiveRates(
            coefficients={"II": 0.5, "ZX": -2 * math.pi, "IX": 0.1},
            residual=0.0,
            qubits=(0, 1),
            all_coefficients={"XX": 0.01},
        )
        assert rates["ZX"] == -2 * math.pi
        assert rates.get("XX") == 0.01
        assert rates.get("YY") == 0.0
        assert rates.dominant() == "ZX"
        assert rates.as_mhz()["ZX"] == pytest.approx(-1.0)
        assert rates.global_phase_rate == 0.5
        with pytest.raises(KeyError):
            rates["XX"]

    def test_zero_fidelity_plan_rejects_zero_ideal(self) -> None:
        """Test plans cannot hold zero-ideal pairs."""
        sample = ZeroFidelitySample(preparation=(0,), observable=1, ideal=0.0, probability=0.5)
        with pytest.raises(ValidationError, match="zero-ideal"):
            ZeroFidelityPlan(target=np.eye(2, dtype=complex), samples=(sample,), seed=0)

    def test_zero_fidelity_plan_size(self) -> None:
        """Test plan size and qubit count."""
        sample = ZeroFidelitySample(preparation=(0, 1), observable=3, ideal=0.4, probability=0.1)
        plan = ZeroFidelityPlan(target=np.eye(4, dtype=complex), samples=(sample, sample), seed=3)
        assert plan.n == 2
        assert plan.size == 2
        assert plan.to_dict()["l"] == 2


class TestScenarioModels:
    """Test scenarios, calibration results and run summaries."""

    def test_in_reduced_span(self) -> None:
        """Test the reduced span check."""
        assert in_reduced_span(pauli_exponential("ZX", math.pi / 4))
        assert not in_reduced_span(pauli_exponential("XZ", 0.3))
        assert not in_reduced_span(np.eye(8))

    def test_scenario_rejects_non_unitary_target(self) -> None:
        """Test non-unitary targets raise error."""
        space = SearchSpace.from_bounds({"x": (0.0, 1.0)})
        with pytest.raises(ConfigurationError, match="not unitary"):
            Scenario(name="bad", target=2 * np.eye(4), space=space)

    def test_scenario_rejects_reduced_chi_outside_span(self) -> None:
        """Test the reduced figure of merit needs a target in its span."""
        space = SearchSpace.from_bounds({"x": (0.0, 1.0)})
        with pytest.raises(ConfigurationError, match="reduced-chi"):
            Scenario(name="zyz", target=pauli_exponential("ZYZ", 0.2), space=space, figure_of_merit="reduced-chi")

    def test_scenario_rejects_unknown_figure_of_merit(self) -> None:
        """Test unknown figures of merit raise error."""
        space = SearchSpace.from_bounds({"x": (0.0, 1.0)})
        with pytest.raises(ConfigurationError, match="Unknown figure of merit"):
            Scenario(name="zx", target=np.eye(4), space=space, figure_of_merit="diamond")

    def test_scenario_n_qubits(self) -> None:
        """Test qubit count of a scenario."""
        space = SearchSpace.from_bounds({"x": (0.0, 1.0)})
        scenario = Scenario(name="zyz", target=pauli_exponential("ZYZ", 0.2), space=space)
        assert scenario.n_qubits == 3
        assert scenario.to_dict()["space"] == {"x": [0.0, 1.0, ""]}

    def test_calibration_result_fails_above_threshold(self) -> None:
        """Test residuals above the threshold mark the calibration failed."""
        result = CalibrationResult(name="phase", values={"phase": 0.1}, residuals={"flip": 0.2}, threshold=0.05)
        assert result.failed
        assert "above" in result.reason
        assert result["phase"] == 0.1
        assert result.finished

    def test_calibration_result_passes(self) -> None:
        """Test residuals within the threshold pass."""
        result = CalibrationResult(name="phase", residuals={"flip": 0.01}, threshold=0.05)
        assert not result.failed
        assert "ok" in str(result)

    def test_calibration_result_dict_round_trip(self) -> None:
        """Test an infinite threshold survives the JSON form."""
        result = CalibrationResult(name="omega_c", values={"omega_c_mhz": 0.4})
        data = json.loads(json.dumps(result.to_dict()))
        assert data["threshold"] is None
        restored = CalibrationResult.from_dict(data)
        assert math.isinf(restored.threshold)
        assert restored.values == {"omega_c_mhz": 0.4}

    def test_scenario_result_summary(self) -> None:
        """Test artifacts are deduplicated and sorted in the summary."""
        result = ScenarioResult(scenario="zx-gate")
        for name in ("trace.jsonl", "config.ini", "trace.jsonl"):
            result.add_artifact(name)
        summary = result.summary()
        assert summary["artifacts"] == ["config.ini", "trace.jsonl"]
        assert summary["incumbent"] is None
        assert summary["evaluations"] == 0


class TestTrace:
    """Test optimization traces."""

    def test_record_json_round_trip(self) -> None:
        """Test records rebuild from JSON."""
        original = record(3, 0.5, 0.6)
        restored = TraceRecord.from_dict(json.loads(original.to_json()))
        assert restored == original
        assert restored.time is not None

    def test_best_skips_failed(self) -> None:
        """Test failed records are not selected as best."""
        trace = OptimizationTrace([record(0, 0.2, 0.2), record(1, 0.9, 0.9, failed=True), record(2, 0.4, 0.9)])
        assert trace.best().iteration == 2
        assert trace.incumbent == 0.9
        assert trace.incumbent_history == [0.2, 0.9, 0.9]

    def test_empty_trace(self) -> None:
        """Test an empty trace."""
        trace = OptimizationTrace()
        assert trace.best() is None
        assert trace.incumbent == float("-inf")
        assert len(trace) == 0

    def test_to_frame_flattens_params(self) -> None:
        """Test parameters become columns."""
        frame = OptimizationTrace([record(0, 0.1, 0.1), record(1, 0.2, 0.2)]).to_frame()
        assert "param_x" in frame.columns
        assert list(frame["value"]) == [0.1, 0.2]

    def test_writer_and_reader(self, tmp_path) -> None:
        """Test the JSON-lines file reproduces the records."""
        path = tmp_path / "trace.jsonl"
        records = [record(0, 0.1, 0.1), record(1, 0.3, 0.3)]
        with TraceWriter(path) as writer:
            for r in records:
                writer.write(r)
        assert len(path.read_text().splitlines()) == 2
        loaded = OptimizationTrace.from_jsonl(path)
        assert loaded.without_timestamps() == OptimizationTrace(records).without_timestamps()

    def test_writer_without_path(self) -> None:
        """Test a writer without a path does nothing."""
        with TraceWriter(None) as writer:
            writer.write(record(0, 0.1, 0.1))
        assert writer.path is None
