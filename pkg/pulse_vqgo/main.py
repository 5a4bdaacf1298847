"""Command-line entry point for pulse-vqgo."""

import argparse
import logging
import sys
from typing import List, Optional

from .config import Config
from .errors import VQGOError
from .models.scenario import ScenarioResult
from .scenarios.runner import replay, run_scenario
from .utils.date_helpers import format_duration, utc_now

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

OPTIMIZE_SCENARIOS = ("zx-gate", "zx1-1yz-gate", "floquet-zyz")
TOMOGRAPHY_EXPERIMENTS = ("identity-baseline", "reduced-scatter")
VERB_SCENARIOS = {
    "calibrate-phase": "phase-calibration",
    "calibrate-omega-c": "omega-c-calibration",
    "drift-study": "drift-study",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulse-vqgo",
        description="Pulse-level transmon simulation and variational quantum gate optimization",
    )
    parser.add_argument("--config", help="INI configuration file")
    parser.add_argument("--seed", type=int, help="Master seed (default: PULSE_VQGO_SEED or 0)")
    parser.add_argument("--output-dir", help="Run directory root (default: PULSE_VQGO_OUTPUT_DIR or ./runs)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    verbs = parser.add_subparsers(dest="verb", required=True)
    verbs.add_parser("calibrate-phase", help="Calibrate the CR drive phase")
    verbs.add_parser("calibrate-omega-c", help="Calibrate the compensating central drive")
    optimize = verbs.add_parser("optimize", help="Run a VQGO scenario")
    optimize.add_argument("--scenario", choices=OPTIMIZE_SCENARIOS, help="Default: [scenario] name")
    tomography = verbs.add_parser("tomography", help="Run a tomography-only experiment")
    tomography.add_argument("--experiment", choices=TOMOGRAPHY_EXPERIMENTS, default="identity-baseline")
    verbs.add_parser("drift-study", help="Repeat tomography of fixed pulses across drift")
    replay_verb = verbs.add_parser("replay", help="Re-run a recorded run and compare its artifacts")
    replay_verb.add_argument("run_dir", help="Directory holding config.ini and run.json")
    return parser


class PulseVQGO:
    """Main application class for pulse-vqgo."""

    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.config = Config()

    def run(self) -> int:
        """Run the requested verb and return the process exit code."""
        print("=== Pulse VQGO ===")
        print("Pulse-level gate optimization on simulated transmons\n")

        try:
            if self.args.verb == "replay":
                return self._replay()

            # Step 1: Configuration
            self._load_config()
            scenario = self._scenario()
            print(f"Scenario: {scenario} ({self.config.tier} tier, seed {self.config.get_seed()})\n")

            # Step 2: Run
            started = utc_now()
            result = run_scenario(self.config, scenario)
            elapsed = (utc_now() - started).total_seconds()

            # Step 3: Report
            self._report(result, elapsed)
            return 0

        except KeyboardInterrupt:
            print("\nOperation cancelled by user.")
            return 0
        except VQGOError as e:
            print(f"error: {e.category}: {e}", file=sys.stderr)
            return e.exit_code
        except Exception as e:
            print(f"Error: {str(e)}", file=sys.stderr)
            return 1

    def _load_config(self) -> None:
        if self.args.config:
            self.config = Config.from_file(self.args.config)
            print(f"Loaded configuration from {self.args.config}")
        if self.args.seed is not None:
            self.config.set_seed(self.args.seed)
        if self.args.output_dir:
            self.config.set_output_dir(self.args.output_dir)

    def _scenario(self) -> str:
        verb = self.args.verb
        if verb == "optimize":
            return self.args.scenario or self.config.scenario
        if verb == "tomography":
            return self.args.experiment
        return VERB_SCENARIOS[verb]

    def _replay(self) -> int:
        print(f"Replaying {self.args.run_dir}...")
        artifacts = replay(self.args.run_dir)
        print(f"✓ Reproduced {len(artifacts)} artifacts")
        return 0

    def _report(self, result: ScenarioResult, elapsed: Optional[float]) -> None:
        print("\n=== Results ===")
        if result.trace is not None and len(result.trace):
            print(f"Evaluations: {len(result.trace)}, incumbent {result.trace.incumbent:.4f}")
        if result.fidelity is not None:
            print(f"Final process fidelity: {result.fidelity:.4f}")
        for calibration in result.calibrations:
            print(f"Calibration {calibration}")
        print(f"Artifacts: {', '.join(sorted(result.artifacts))}")
        print(f"Elapsed: {format_duration(elapsed)}")


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    sys.exit(PulseVQGO(args).run())


if __name__ == "__main__":
    main()
