"""Unit tests for the command-line entry point."""

from datetime import datetime, timedelta, timezone
from unittest.mock import patch

import pytest

from pulse_vqgo.errors import CalibrationError, ReplayMismatchError
from pulse_vqgo.main import PulseVQGO, build_parser, main
from pulse_vqgo.models.scenario import CalibrationResult, ScenarioResult


def parse(*argv: str):
    return build_parser().parse_args(list(argv))


def fake_result() -> ScenarioResult:
    result = ScenarioResult(scenario="zx-gate", fidelity=0.97)
    result.calibrations.append(CalibrationResult(name="cr-phase", values={"phase": 0.1}))
    result.add_artifact("trace.jsonl")
    return result


class TestParser:
    """Test argument parsing."""

    def test_verb_is_required(self) -> None:
        """Test a missing verb exits with a usage error."""
        with pytest.raises(SystemExit):
            parse()

    def test_global_options(self) -> None:
        """Test options before the verb."""
        args = parse("--seed", "4", "--output-dir", "out", "-v", "optimize", "--scenario", "floquet-zyz")
        assert args.seed == 4
        assert args.output_dir == "out"
        assert args.verbose
        assert args.scenario == "floquet-zyz"

    def test_unknown_optimize_scenario(self) -> None:
        """Test scenario choices are enforced."""
        with pytest.raises(SystemExit):
            parse("optimize", "--scenario", "identity-baseline")

    def test_tomography_default(self) -> None:
        """Test the tomography verb defaults to the identity baseline."""
        assert parse("tomography").experiment == "identity-baseline"


class TestPulseVQGO:
    """Test the application wrapper."""

    @patch("pulse_vqgo.main.run_scenario")
    def test_verbs_map_to_scenarios(self, run_scenario, tmp_path) -> None:
        """Test each verb runs its scenario with the command-line seed."""
        run_scenario.return_value = fake_result()
        cases = {
            ("calibrate-phase",): "phase-calibration",
            ("calibrate-omega-c",): "omega-c-calibration",
            ("drift-study",): "drift-study",
            ("optimize", "--scenario", "zx1-1yz-gate"): "zx1-1yz-gate",
            ("tomography", "--experiment", "reduced-scatter"): "reduced-scatter",
        }
        for verb, scenario in cases.items():
            app = PulseVQGO(parse("--seed", "8", "--output-dir", str(tmp_path), *verb))
            assert app.run() == 0
            config, name = run_scenario.call_args[0]
            assert name == scenario
            assert config.get_seed() == 8

    @patch("pulse_vqgo.main.run_scenario")
    def test_optimize_uses_config_scenario(self, run_scenario, tmp_path) -> None:
        """Test optimize without --scenario falls back to [scenario] name."""
        run_scenario.return_value = fake_result()
        path = tmp_path / "run.ini"
        path.write_text("[scenario]\nname = floquet-zyz\n")
        assert PulseVQGO(parse("--config", str(path), "optimize")).run() == 0
        assert run_scenario.call_args[0][1] == "floquet-zyz"

    @patch("pulse_vqgo.main.run_scenario")
    def test_report(self, run_scenario, capsys) -> None:
        """Test the summary printed after a run."""
        run_scenario.return_value = fake_result()
        PulseVQGO(parse("optimize")).run()
        out = capsys.readouterr().out
        assert "Final process fidelity: 0.9700" in out
        assert "cr-phase" in out
        assert "trace.jsonl" in out

    @patch("pulse_vqgo.main.utc_now")
    @patch("pulse_vqgo.main.run_scenario")
    def test_report_elapsed_time(self, run_scenario, utc_now, capsys) -> None:
        """Test the elapsed time is the difference of the two clock readings."""
        run_scenario.return_value = fake_result()
        start = datetime(2024, 5, 1, 12, 0, 0, tzinfo=timezone.utc)
        utc_now.side_effect = [start, start + timedelta(minutes=1, seconds=30)]
        PulseVQGO(parse("optimize")).run()
        assert "Elapsed: 1m 30s" in capsys.readouterr().out

    @patch("pulse_vqgo.main.run_scenario", side_effect=CalibrationError("not bracketed"))
    def test_library_error_exit_code(self, run_scenario, capsys) -> None:
        """Test library errors map to their category exit codes."""
        assert PulseVQGO(parse("calibrate-phase")).run() == 3
        assert "calibration: not bracketed" in capsys.readouterr().err

    @patch("pulse_vqgo.main.run_scenario", side_effect=RuntimeError("boom"))
    def test_unexpected_error_exit_code(self, run_scenario) -> None:
        """Test unexpected errors exit with 1."""
        assert PulseVQGO(parse("calibrate-phase")).run() == 1

    @patch("pulse_vqgo.main.run_scenario", side_effect=KeyboardInterrupt)
    def test_keyboard_interrupt(self, run_scenario, capsys) -> None:
        """Test cancellation exits cleanly."""
        assert PulseVQGO(parse("drift-study")).run() == 0
        assert "cancelled" in capsys.readouterr().out

    def test_missing_config_file(self, tmp_path) -> None:
        """Test an unreadable config exits with the configuration code."""
        assert PulseVQGO(parse("--config", str(tmp_path / "missing.ini"), "optimize")).run() == 2

    @patch("pulse_vqgo.main.replay")
    def test_replay(self, replay, capsys) -> None:
        """Test the replay verb reports the reproduced artifacts."""
        replay.return_value = ["a.csv", "trace.jsonl"]
        assert PulseVQGO(parse("replay", "runs/zx-gate-seed0")).run() == 0
        replay.assert_called_once_with("runs/zx-gate-seed0")
        assert "Reproduced 2 artifacts" in capsys.readouterr().out

    @patch("pulse_vqgo.main.replay", side_effect=ReplayMismatchError("differs in trace.jsonl"))
    def test_replay_mismatch(self, replay) -> None:
        """Test mismatches exit with the replay code."""
        assert PulseVQGO(parse("replay", "runs/x")).run() == 8


class TestMain:
    """Test the process entry point."""

    @patch("pulse_vqgo.main.run_scenario")
    def test_main_exits_with_code(self, run_scenario) -> None:
        """Test main exits with the application's return code."""
        run_scenario.return_value = fake_result()
        with pytest.raises(SystemExit) as exc:
            main(["tomography"])
        assert exc.value.code == 0
