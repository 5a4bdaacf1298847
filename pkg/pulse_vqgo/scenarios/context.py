"""Run directory and per-task seed streams of one scenario run."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from ..analysis.serialization import save_plan, write_chi, write_table
from ..config import Config
from ..models.process import ProcessMatrix, ZeroFidelityPlan
from ..models.scenario import ScenarioResult
from ..utils.validators import sanitize_filename

logger = logging.getLogger(__name__)


class RunContext:
    """Where a scenario writes its artifacts and how it derives its seeds."""

    def __init__(self, config: Config, scenario: str, run_dir: Optional[Path] = None) -> None:
        self.config = config
        self.scenario = scenario
        self.seed = config.get_seed()
        if run_dir is None:
            run_dir = config.get_output_dir() / sanitize_filename(f"{scenario}-seed{self.seed}")
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.result = ScenarioResult(scenario=scenario)

    def task_seed(self, *key: int) -> int:
        """Seed of the independent stream (master seed, key)."""
        return int(np.random.SeedSequence(self.seed, spawn_key=key).generate_state(1)[0])

    def optimizer_seed(self, stage: int = 0) -> int:
        base = self.config.optimizer_seed
        if base >= 0:
            return int(np.random.SeedSequence(base, spawn_key=(stage,)).generate_state(1)[0])
        return self.task_seed(1, stage)

    def path(self, name: str) -> Path:
        """Artifact path; the file is registered with the result."""
        self.result.add_artifact(name)
        return self.run_dir / name

    def fresh_path(self, name: str) -> Path:
        """Artifact path with any previous file of that name removed."""
        path = self.path(name)
        if path.exists():
            path.unlink()
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.path(name)
        path.write_text(text, encoding="utf-8")
        return path

    def write_json(self, name: str, data: Dict[str, Any]) -> Path:
        return self.write_text(name, json.dumps(data, indent=2, sort_keys=True, default=_plain) + "\n")

    def header(self) -> Dict[str, Any]:
        """Master seed and full noise configuration stamped on every result file."""
        return {"scenario": self.scenario, "seed": self.seed, "noise": self.config.noise_record()}

    def write_chi(self, name: str, chi: ProcessMatrix) -> Path:
        return write_chi(chi, self.path(name), header=self.header())

    def write_table(self, name: str, frame: pd.DataFrame) -> Path:
        return write_table(frame, self.path(name), header=self.header())

    def save_plan(self, name: str, plan: ZeroFidelityPlan) -> Path:
        return save_plan(plan, self.path(name), header=self.header())


def _plain(value: Any) -> Any:
    """numpy scalars and arrays as JSON-ready Python values."""
    if isinstance(value, (np.generic, np.ndarray)):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")
