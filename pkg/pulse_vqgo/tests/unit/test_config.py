"""Unit tests for configuration management."""

import math
import os
from unittest.mock import patch

import pytest

from pulse_vqgo.config import SCENARIOS, Config
from pulse_vqgo.errors import ConfigurationError
from pulse_vqgo.noise.readout import identity_fidelity_under_readout


class TestConfig:
    """Test configuration management."""

    def test_default_values(self) -> None:
        """Test default configuration values."""
        config = Config()
        assert config.seed is None
        assert config.tier == "qubit"
        assert config.scenario == "zx-gate"
        assert config.figure_of_merit == "reduced-chi"
        assert config.budget == 100
        assert config.omega_h_mhz == (5544.0, 5323.0, 5486.0)
        assert config.coupling_mhz == (1.955, 2.052)

    def test_defaults_validate(self) -> None:
        """Test the default configuration passes validation."""
        Config().validate()

    def test_set_seed_valid(self) -> None:
        """Test setting a valid seed."""
        config = Config()
        config.set_seed(42)
        assert config.get_seed() == 42

    def test_set_seed_negative_raises_error(self) -> None:
        """Test negative seed raises error."""
        config = Config()
        with pytest.raises(ValueError, match="Seed must be non-negative"):
            config.set_seed(-1)

    @patch.dict(os.environ, {"PULSE_VQGO_SEED": "17"})
    def test_get_seed_from_environment(self) -> None:
        """Test getting the seed from the environment variable."""
        config = Config()
        assert config.get_seed() == 17

    @patch.dict(os.environ, {"PULSE_VQGO_SEED": "abc"})
    def test_get_seed_bad_environment_raises_error(self) -> None:
        """Test a non-numeric environment seed raises error."""
        config = Config()
        with pytest.raises(ValueError, match="PULSE_VQGO_SEED"):
            config.get_seed()

    @patch.dict(os.environ, {}, clear=True)
    def test_get_seed_default_zero(self) -> None:
        """Test the seed defaults to zero."""
        assert Config().get_seed() == 0

    def test_set_seed_overrides_environment(self) -> None:
        """Test explicit seed wins over the environment."""
        with patch.dict(os.environ, {"PULSE_VQGO_SEED": "5"}):
            config = Config()
            config.set_seed(9)
            assert config.get_seed() == 9

    @patch.dict(os.environ, {"PULSE_VQGO_OUTPUT_DIR": "/tmp/vqgo-runs"})
    def test_get_output_dir_from_environment(self) -> None:
        """Test output directory from the environment variable."""
        assert str(Config().get_output_dir()) == "/tmp/vqgo-runs"

    @patch.dict(os.environ, {}, clear=True)
    def test_get_output_dir_default(self) -> None:
        """Test the default output directory."""
        assert str(Config().get_output_dir()) == "runs"

    def test_set_output_dir_empty_raises_error(self) -> None:
        """Test empty output directory raises error."""
        config = Config()
        with pytest.raises(ValueError, match="Output directory cannot be empty"):
            config.set_output_dir("   ")

    def test_validate_tier(self) -> None:
        """Test tier validation."""
        config = Config()
        assert config.validate_tier("qubit") is True
        assert config.validate_tier("transmon") is True
        assert config.validate_tier("qutrit") is False

    def test_validate_scenario(self) -> None:
        """Test scenario name validation."""
        config = Config()
        for name in SCENARIOS:
            assert config.validate_scenario(name) is True
        assert config.validate_scenario("unknown") is False

    def test_validate_figure_of_merit(self) -> None:
        """Test figure-of-merit validation."""
        config = Config()
        assert config.validate_figure_of_merit("zero-fidelity") is True
        assert config.validate_figure_of_merit("average") is False

    def test_sample_period_in_microseconds(self) -> None:
        """Test the sample period conversion from ns."""
        config = Config()
        config.sample_period_ns = 0.5
        assert config.sample_period == pytest.approx(5e-4)

    def test_angular_conversion(self) -> None:
        """Test MHz to rad/us conversion."""
        assert Config().angular(1.0) == pytest.approx(2 * math.pi)


class TestConfigFile:
    """Test INI parsing and snapshots."""

    def test_from_ini_parses_lists_and_mappings(self) -> None:
        """Test list and mapping values are parsed."""
        config = Config.from_ini(
            "[device]\n"
            "omega_h_mhz = 5000, 5100\n"
            "epsilon = 0.2, 0.21\n"
            "coupling_mhz = 2.0\n"
            "[noise]\n"
            "phase_offsets = cr01:0.3, cr21:-0.1\n"
            "[optimizer]\n"
            "budget = 12\n"
        )
        assert config.omega_h_mhz == (5000.0, 5100.0)
        assert config.epsilon == (0.2, 0.21)
        assert config.coupling_mhz == (2.0,)
        assert config.phase_offsets == {"cr01": 0.3, "cr21": -0.1}
        assert config.budget == 12

    def test_from_ini_unknown_section_raises_error(self) -> None:
        """Test unknown section raises error."""
        with pytest.raises(ConfigurationError, match="Unknown config section"):
            Config.from_ini("[hardware]\nqubits = 3\n")

    def test_from_ini_unknown_key_raises_error(self) -> None:
        """Test unknown key raises error."""
        with pytest.raises(ConfigurationError, match="Unknown key 'colour'"):
            Config.from_ini("[device]\ncolour = blue\n")

    def test_from_ini_bad_integer_raises_error(self) -> None:
        """Test non-integer budget raises error."""
        with pytest.raises(ConfigurationError, match="must be an integer"):
            Config.from_ini("[optimizer]\nbudget = ten\n")

    def test_from_ini_bad_mapping_raises_error(self) -> None:
        """Test malformed mapping raises error."""
        with pytest.raises(ConfigurationError, match="name:value"):
            Config.from_ini("[noise]\nphase_offsets = cr01\n")

    def test_from_ini_malformed_text_raises_error(self) -> None:
        """Test text without section headers raises error."""
        with pytest.raises(ConfigurationError, match="Malformed config"):
            Config.from_ini("budget = 3\n")

    def test_from_ini_mismatched_lengths_raises_error(self) -> None:
        """Test omega_h and epsilon of different length raise error."""
        with pytest.raises(ConfigurationError, match="equal length"):
            Config.from_ini("[device]\nomega_h_mhz = 5000, 5100\nepsilon = 0.2\ncoupling_mhz = 2.0\n")

    def test_from_ini_unknown_tier_raises_error(self) -> None:
        """Test unknown tier raises error."""
        with pytest.raises(ConfigurationError, match="Unknown tier"):
            Config.from_ini("[device]\ntier = fluxonium\n")

    def test_from_ini_readout_probability_out_of_range(self) -> None:
        """Test readout probabilities must stay below one half."""
        with pytest.raises(ConfigurationError, match="readout_p01"):
            Config.from_ini("[noise]\nreadout_p01 = 0.6, 0.1\nreadout_p10 = 0.1, 0.1\n")

    def test_from_file_missing_raises_error(self, tmp_path) -> None:
        """Test reading a missing file raises error."""
        with pytest.raises(ConfigurationError, match="Cannot read config"):
            Config.from_file(tmp_path / "missing.ini")

    def test_from_file_reads_shipped_config(self) -> None:
        """Test a shipped configuration file loads."""
        root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.dirname(__file__))))
        config = Config.from_file(os.path.join(root, "configs", "phase-calibration.ini"))
        assert config.scenario == "phase-calibration"
        assert config.phase_offsets == {"cr01": 0.3}

    def test_snapshot_reproduces_every_value(self) -> None:
        """Test the INI snapshot parses back to the same settings."""
        config = Config()
        config.phase_offsets = {"cr01": 0.25}
        config.readout_p01 = (0.01, 0.02)
        config.readout_p10 = (0.03, 0.04)
        config.budget = 7
        restored = Config.from_ini(config.to_ini())
        assert restored.to_dict() == config.to_dict()

    def test_to_dict_keys(self) -> None:
        """Test flat dictionary keys use section.key names."""
        data = Config().to_dict()
        assert data["optimizer.budget"] == 100
        assert data["device.tier"] == "qubit"


class TestConfigModels:
    """Test model factories built from configuration."""

    def test_device_model_uses_angular_units(self) -> None:
        """Test the device model converts MHz."""
        device = Config().device_model()
        assert device.n == 3
        assert device.omega_h[0] == pytest.approx(2 * math.pi * 5544.0)

    def test_qubit_model_explicit_frequencies(self) -> None:
        """Test explicit qubit frequencies are used as given."""
        config = Config()
        config.qubit_freq_mhz = (5000.0, 4800.0, 4950.0)
        model = config.qubit_model()
        assert model.qubit_freq[1] == pytest.approx(2 * math.pi * 4800.0)

    def test_qubit_model_reduced_from_chain(self) -> None:
        """Test the qubit model falls back to the chain's two-level reduction."""
        model = Config().qubit_model()
        assert model.n == 3
        for freq, omega_h in zip(model.qubit_freq, Config().device_model().omega_h):
            assert 0.9 * omega_h < freq < omega_h

    def test_readout_model_explicit(self) -> None:
        """Test explicit readout errors are truncated to the register."""
        config = Config()
        config.readout_p01 = (0.01, 0.02, 0.03)
        config.readout_p10 = (0.04, 0.05, 0.06)
        readout = config.readout_model(2)
        assert readout.p01 == (0.01, 0.02)
        assert readout.p10 == (0.04, 0.05)

    def test_readout_model_too_few_entries(self) -> None:
        """Test too few readout entries raise error."""
        config = Config()
        config.readout_p01 = (0.01,)
        config.readout_p10 = (0.01,)
        with pytest.raises(ConfigurationError, match="need 3"):
            config.readout_model(3)

    def test_readout_model_ideal_by_default(self) -> None:
        """Test readout is ideal without noise settings."""
        assert Config().readout_model(3).is_ideal

    def test_readout_model_from_identity_baseline(self) -> None:
        """Test the baseline fixes one per-qubit error for every register size."""
        config = Config()
        config.identity_baseline = 0.95
        readout = config.readout_model(3)
        assert readout.n == 3
        assert len(set(readout.p01)) == 1
        assert identity_fidelity_under_readout(readout.p01[0], 2) == pytest.approx(0.95, abs=1e-8)

    def test_noise_record_covers_chain(self) -> None:
        """Test the recorded readout lists every qubit of a three-qubit chain."""
        config = Config()
        config.readout_p01 = (0.01, 0.02, 0.03)
        config.readout_p10 = (0.04, 0.05, 0.06)
        config.drift_seed = 5
        record = config.noise_record()
        assert record["readout"]["p01"] == [0.01, 0.02, 0.03]
        assert record["readout"]["p10"] == [0.04, 0.05, 0.06]
        assert record["drift"]["seed"] == 5
        assert set(record) == {"readout", "distortion", "drift"}

    def test_noise_record_resolves_baseline(self) -> None:
        """Test a baseline-calibrated readout is recorded for the whole chain."""
        config = Config()
        config.identity_baseline = 0.95
        readout = config.noise_record()["readout"]
        assert len(readout["p01"]) == config.chain_length() == 3
        assert readout["identity_baseline"] == 0.95

    def test_distortion_from_config(self) -> None:
        """Test line distortion settings are carried over."""
        config = Config()
        config.phase_offsets = {"cr01": 0.1}
        config.kappa = 0.2
        distortion = config.distortion()
        assert distortion.phase_offsets == {"cr01": 0.1}
        assert distortion.kappa == 0.2

    def test_drift_process_from_khz(self) -> None:
        """Test drift steps are converted from kHz."""
        config = Config()
        config.drift_frequency_khz = 1.0
        config.drift_tick_seconds = 300.0
        drift = config.drift_process()
        assert drift.frequency_step == pytest.approx(2 * math.pi * 1e-3)
        assert drift.tick_duration == 300.0
