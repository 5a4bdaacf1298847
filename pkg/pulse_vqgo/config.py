"""Configuration management for pulse-vqgo runs."""

import configparser
import io
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from .device.transmon import TransmonChain
from .errors import ConfigurationError
from .models.device import DeviceModel, QubitModel, mhz_to_angular
from .models.pulse import DEFAULT_RAMP_SAMPLES, DEFAULT_SAMPLE_PERIOD
from .models.scenario import FIGURES_OF_MERIT
from .noise.distortion import LineDistortion
from .noise.drift import DriftProcess
from .noise.readout import ReadoutModel, calibrate_readout_to_baseline, readout_from_config
from .utils.validators import (
    format_float_list,
    format_mapping,
    parse_float_list,
    parse_mapping,
    validate_probability,
)

SCENARIOS = (
    "phase-calibration",
    "omega-c-calibration",
    "zx-gate",
    "zx1-1yz-gate",
    "floquet-zyz",
    "identity-baseline",
    "reduced-scatter",
    "drift-study",
)
TIERS = ("qubit", "transmon")

# (section, key) -> (attribute, kind)
SCHEMA: Dict[Tuple[str, str], Tuple[str, str]] = {
    ("device", "tier"): ("tier", "str"),
    ("device", "qubit_freq_mhz"): ("qubit_freq_mhz", "floats"),
    ("device", "omega_h_mhz"): ("omega_h_mhz", "floats"),
    ("device", "epsilon"): ("epsilon", "floats"),
    ("device", "coupling_mhz"): ("coupling_mhz", "floats"),
    ("device", "levels_per_transmon"): ("levels_per_transmon", "int"),
    ("device", "global_truncation"): ("global_truncation", "int"),
    ("pulse", "duration_us"): ("duration_us", "float"),
    ("pulse", "sample_period_ns"): ("sample_period_ns", "float"),
    ("pulse", "ramp_samples"): ("ramp_samples", "int"),
    ("pulse", "cr_amplitude_mhz"): ("cr_amplitude_mhz", "floats"),
    ("pulse", "cr_max_amplitude_mhz"): ("cr_max_amplitude_mhz", "float"),
    ("pulse", "cr_phases"): ("cr_phases", "floats"),
    ("pulse", "resonant_amplitude_mhz"): ("resonant_amplitude_mhz", "float"),
    ("pulse", "compensation_mhz"): ("compensation_mhz", "float"),
    ("pulse", "zx_rate_mhz"): ("zx_rate_mhz", "float"),
    ("pulse", "floquet_weights_mhz"): ("floquet_weights_mhz", "floats"),
    ("pulse", "floquet_frequency_mhz"): ("floquet_frequency_mhz", "float"),
    ("pulse", "floquet_periods"): ("floquet_periods", "int"),
    ("noise", "readout_p01"): ("readout_p01", "floats"),
    ("noise", "readout_p10"): ("readout_p10", "floats"),
    ("noise", "identity_baseline"): ("identity_baseline", "float"),
    ("noise", "phase_offsets"): ("phase_offsets", "mapping"),
    ("noise", "amplitude_scales"): ("amplitude_scales", "mapping"),
    ("noise", "kappa"): ("kappa", "float"),
    ("noise", "threshold"): ("threshold", "float"),
    ("drift", "frequency_khz"): ("drift_frequency_khz", "float"),
    ("drift", "coupling_khz"): ("drift_coupling_khz", "float"),
    ("drift", "phase_rad"): ("drift_phase_rad", "float"),
    ("drift", "tick_seconds"): ("drift_tick_seconds", "float"),
    ("drift", "seed"): ("drift_seed", "int"),
    ("optimizer", "budget"): ("budget", "int"),
    ("optimizer", "exploration_fraction"): ("exploration_fraction", "float"),
    ("optimizer", "acquisition_seeds"): ("acquisition_seeds", "int"),
    ("optimizer", "refine"): ("refine", "int"),
    ("optimizer", "seed"): ("optimizer_seed", "int"),
    ("scenario", "name"): ("scenario", "str"),
    ("scenario", "figure_of_merit"): ("figure_of_merit", "str"),
    ("scenario", "shots"): ("shots", "int"),
    ("scenario", "zero_fidelity_samples"): ("zero_fidelity_samples", "int"),
    ("scenario", "zero_fidelity_shots"): ("zero_fidelity_shots", "int"),
    ("scenario", "drift_ticks"): ("drift_ticks", "int"),
    ("scenario", "tomography_shots"): ("tomography_shots", "int"),
}


class Config:
    """Configuration settings for a pulse-vqgo run; frequencies in MHz."""

    def __init__(self) -> None:
        self.seed: Optional[int] = None
        self.output_dir: Optional[str] = None

        self.tier: str = "qubit"
        self.qubit_freq_mhz: Tuple[float, ...] = ()
        self.omega_h_mhz: Tuple[float, ...] = (5544.0, 5323.0, 5486.0)
        self.epsilon: Tuple[float, ...] = (0.209, 0.218, 0.212)
        self.coupling_mhz: Tuple[float, ...] = (1.955, 2.052)
        self.levels_per_transmon: int = 4
        self.global_truncation: int = 64

        self.duration_us: float = 1.0
        self.sample_period_ns: float = DEFAULT_SAMPLE_PERIOD * 1e3
        self.ramp_samples: int = DEFAULT_RAMP_SAMPLES
        self.cr_amplitude_mhz: Tuple[float, ...] = (18.24, 19.76)
        self.cr_max_amplitude_mhz: float = 60.0
        self.cr_phases: Tuple[float, ...] = (0.0, 0.0)
        self.resonant_amplitude_mhz: float = 0.25
        self.compensation_mhz: float = 0.466
        self.zx_rate_mhz: float = 0.2
        self.floquet_weights_mhz: Tuple[float, ...] = (0.080, 2.170, 2.491)
        self.floquet_frequency_mhz: float = 1.0
        self.floquet_periods: int = 3

        self.readout_p01: Tuple[float, ...] = ()
        self.readout_p10: Tuple[float, ...] = ()
        self.identity_baseline: float = 0.0
        self.phase_offsets: Dict[str, float] = {}
        self.amplitude_scales: Dict[str, float] = {}
        self.kappa: float = 0.0
        self.threshold: float = 0.1

        self.drift_frequency_khz: float = 0.0
        self.drift_coupling_khz: float = 0.0
        self.drift_phase_rad: float = 0.0
        self.drift_tick_seconds: float = 60.0
        self.drift_seed: int = 0

        self.budget: int = 100
        self.exploration_fraction: float = 0.25
        self.acquisition_seeds: int = 64
        self.refine: int = 8
        self.optimizer_seed: int = -1

        self.scenario: str = "zx-gate"
        self.figure_of_merit: str = "reduced-chi"
        self.shots: int = 0
        self.zero_fidelity_samples: int = 200
        self.zero_fidelity_shots: int = 1024
        self.drift_ticks: int = 0
        self.tomography_shots: int = 0

    def set_seed(self, seed: int) -> None:
        """Set the master seed."""
        if seed < 0:
            raise ValueError("Seed must be non-negative")
        self.seed = int(seed)

    def get_seed(self) -> int:
        """Master seed from the setter, then PULSE_VQGO_SEED, then 0."""
        if self.seed is None:
            env_seed = os.getenv("PULSE_VQGO_SEED")
            if env_seed:
                try:
                    self.set_seed(int(env_seed.strip()))
                except ValueError:
                    raise ValueError("PULSE_VQGO_SEED must be a non-negative integer")
            else:
                self.seed = 0
        return int(self.seed)

    def set_output_dir(self, output_dir: str) -> None:
        if not output_dir or not output_dir.strip():
            raise ValueError("Output directory cannot be empty")
        self.output_dir = output_dir.strip()

    def get_output_dir(self) -> Path:
        """Output directory from the setter, then PULSE_VQGO_OUTPUT_DIR, then ./runs."""
        if not self.output_dir:
            self.output_dir = (os.getenv("PULSE_VQGO_OUTPUT_DIR") or "runs").strip()
        return Path(self.output_dir)

    def validate_tier(self, tier: str) -> bool:
        return tier in TIERS

    def validate_scenario(self, name: str) -> bool:
        return name in SCENARIOS

    def validate_figure_of_merit(self, name: str) -> bool:
        return name in FIGURES_OF_MERIT

    def validate(self) -> None:
        """Cross-field checks; raises ConfigurationError."""
        if not self.validate_tier(self.tier):
            raise ConfigurationError(f"Unknown tier '{self.tier}'")
        if not self.validate_scenario(self.scenario):
            raise ConfigurationError(f"Unknown scenario '{self.scenario}'")
        if not self.validate_figure_of_merit(self.figure_of_merit):
            raise ConfigurationError(f"Unknown figure of merit '{self.figure_of_merit}'")
        if len(self.omega_h_mhz) != len(self.epsilon):
            raise ConfigurationError("omega_h_mhz and epsilon must have equal length")
        if len(self.coupling_mhz) != len(self.omega_h_mhz) - 1:
            raise ConfigurationError("coupling_mhz needs one entry per adjacent pair")
        if self.qubit_freq_mhz and len(self.qubit_freq_mhz) != len(self.omega_h_mhz):
            raise ConfigurationError("qubit_freq_mhz must list every qubit")
        if len(self.readout_p01) != len(self.readout_p10):
            raise ConfigurationError("readout_p01 and readout_p10 must have equal length")
        if self.duration_us <= 0 or self.sample_period_ns <= 0:
            raise ConfigurationError("Durations must be positive")
        if self.budget < 1:
            raise ConfigurationError("Optimizer budget must be at least 1")
        if not 0.0 <= self.exploration_fraction <= 1.0:
            raise ConfigurationError("exploration_fraction must lie in [0, 1]")
        if self.floquet_periods < 1:
            raise ConfigurationError("floquet_periods must be at least 1")
        if self.drift_ticks < 0 or self.shots < 0 or self.tomography_shots < 0:
            raise ConfigurationError("Shot and tick counts cannot be negative")
        try:
            for name in ("readout_p01", "readout_p10"):
                for p in getattr(self, name):
                    validate_probability(p, name, upper=0.5)
            validate_probability(self.identity_baseline, "identity_baseline", upper=1.0 + 1e-12)
        except ValueError as e:
            raise ConfigurationError(str(e))

    @property
    def sample_period(self) -> float:
        """AWG sample period in us."""
        return self.sample_period_ns * 1e-3

    def device_model(self) -> DeviceModel:
        return DeviceModel.from_dict(
            {
                "omega_h_mhz": self.omega_h_mhz,
                "epsilon": self.epsilon,
                "coupling_mhz": self.coupling_mhz,
                "levels_per_transmon": self.levels_per_transmon,
                "global_truncation": self.global_truncation,
            }
        )

    def qubit_model(self) -> QubitModel:
        """Explicit qubit frequencies, or the two-level reduction of the transmon chain."""
        if self.qubit_freq_mhz:
            return QubitModel.from_dict({"qubit_freq_mhz": self.qubit_freq_mhz, "coupling_mhz": self.coupling_mhz})
        model, _ = TransmonChain(self.device_model()).reduced_qubit_model()
        return model

    def angular(self, value_mhz: float) -> float:
        return mhz_to_angular([value_mhz])[0]

    def readout_model(self, n: int) -> ReadoutModel:
        """
        Readout error model for an n-qubit register.

        Explicit p01/p10 lists win. Otherwise a non-zero identity baseline,
        read as the two-qubit identity fidelity, is calibrated by bisection
        and the resulting per-qubit error applied to all n qubits.
        """
        if self.readout_p01:
            if len(self.readout_p01) < n:
                raise ConfigurationError(f"Readout error listed for {len(self.readout_p01)} qubits, need {n}")
            return readout_from_config(self.readout_p01[:n], self.readout_p10[:n])
        if self.identity_baseline:
            pair = calibrate_readout_to_baseline(self.identity_baseline, 2)
            return ReadoutModel.symmetric(pair.p01[0], n)
        return ReadoutModel.ideal(n)

    def chain_length(self) -> int:
        """Qubits in the configured chain."""
        if self.tier == "qubit" and self.qubit_freq_mhz:
            return len(self.qubit_freq_mhz)
        return len(self.omega_h_mhz)

    def noise_record(self) -> Dict[str, Any]:
        """
        Full noise configuration as recorded with every result.

        Readout covers the whole chain: the listed per-qubit errors when
        given, otherwise the model the baseline resolves to.
        """
        if self.readout_p01:
            readout = {"p01": list(self.readout_p01), "p10": list(self.readout_p10)}
        else:
            readout = self.readout_model(self.chain_length()).to_dict()
        readout["identity_baseline"] = self.identity_baseline
        return {
            "readout": readout,
            "distortion": self.distortion().to_dict(),
            "drift": {
                "frequency_khz": self.drift_frequency_khz,
                "coupling_khz": self.drift_coupling_khz,
                "phase_rad": self.drift_phase_rad,
                "tick_seconds": self.drift_tick_seconds,
                "seed": self.drift_seed,
            },
        }

    def distortion(self) -> LineDistortion:
        return LineDistortion(
            phase_offsets=dict(self.phase_offsets),
            amplitude_scales=dict(self.amplitude_scales),
            kappa=self.kappa,
            threshold=self.threshold,
        )

    def drift_process(self) -> DriftProcess:
        return DriftProcess.from_khz(
            self.drift_frequency_khz,
            self.drift_coupling_khz,
            self.drift_phase_rad,
            tick_duration=self.drift_tick_seconds,
            seed=self.drift_seed,
        )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "Config":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"Cannot read config {path}: {e}")
        return cls.from_ini(text)

    @classmethod
    def from_ini(cls, text: str) -> "Config":
        """Parse INI text; unknown sections or keys raise ConfigurationError."""
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as e:
            raise ConfigurationError(f"Malformed config: {e}")
        config = cls()
        sections = {section for section, _ in SCHEMA}
        for section in parser.sections():
            if section not in sections:
                raise ConfigurationError(f"Unknown config section [{section}]")
            for key, raw in parser.items(section):
                if (section, key) not in SCHEMA:
                    raise ConfigurationError(f"Unknown key '{key}' in [{section}]")
                attribute, kind = SCHEMA[(section, key)]
                try:
                    setattr(config, attribute, _parse(raw, kind, f"{section}.{key}"))
                except ValueError as e:
                    raise ConfigurationError(str(e))
        config.validate()
        return config

    def to_ini(self) -> str:
        """Snapshot of every resolved value in the same INI layout."""
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for (section, key), (attribute, kind) in SCHEMA.items():
            if not parser.has_section(section):
                parser.add_section(section)
            parser.set(section, key, _format(getattr(self, attribute), kind))
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {f"{section}.{key}": getattr(self, attribute) for (section, key), (attribute, _) in SCHEMA.items()}


def _parse(raw: str, kind: str, name: str) -> Any:
    if kind == "floats":
        return parse_float_list(raw, name)
    if kind == "mapping":
        return parse_mapping(raw, name)
    if kind == "int":
        try:
            return int(raw.strip())
        except ValueError:
            raise ValueError(f"{name} must be an integer")
    if kind == "float":
        try:
            return float(raw.strip())
        except ValueError:
            raise ValueError(f"{name} must be a number")
    return raw.strip()


def _format(value: Any, kind: str) -> str:
    if kind == "floats":
        return format_float_list(value)
    if kind == "mapping":
        return format_mapping(value)
    if kind == "float":
        return repr(float(value))
    return str(value)
