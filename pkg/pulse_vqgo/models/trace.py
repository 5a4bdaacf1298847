"""Optimization trace records and their JSON-lines form."""

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, IO, List, Optional, Union

import pandas as pd

from ..errors import ConfigurationError
from ..utils.date_helpers import parse_timestamp, to_iso, utc_now

logger = logging.getLogger(__name__)


def utc_timestamp() -> str:
    return to_iso(utc_now())


@dataclass(frozen=True)
class TraceRecord:
    """One objective evaluation."""

    iteration: int
    params: Dict[str, float]
    value: float
    stderr: float
    tick: int
    incumbent: float
    phase: str
    failed: bool = False
    timestamp: str = field(default_factory=utc_timestamp)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TraceRecord":
        return cls(
            iteration=int(data["iteration"]),
            params={k: float(v) for k, v in data["params"].items()},
            value=float(data["value"]),
            stderr=float(data["stderr"]),
            tick=int(data["tick"]),
            incumbent=float(data["incumbent"]),
            phase=str(data["phase"]),
            failed=bool(data.get("failed", False)),
            timestamp=str(data.get("timestamp", "")),
        )

    @property
    def time(self) -> Optional[datetime]:
        return parse_timestamp(self.timestamp)


@dataclass
class OptimizationTrace:
    """Ordered evaluation records of one optimization run."""

    records: List[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def incumbent_history(self) -> List[float]:
        return [r.incumbent for r in self.records]

    @property
    def incumbent(self) -> float:
        return self.records[-1].incumbent if self.records else float("-inf")

    def best(self) -> Optional[TraceRecord]:
        """Record with the highest value among successful evaluations."""
        candidates = [r for r in self.records if not r.failed]
        return max(candidates, key=lambda r: r.value) if candidates else None

    def values(self) -> List[float]:
        return [r.value for r in self.records]

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for r in self.records:
            row = {k: v for k, v in r.to_dict().items() if k != "params"}
            row.update({f"param_{k}": v for k, v in r.params.items()})
            rows.append(row)
        return pd.DataFrame(rows)

    def without_timestamps(self) -> List[Dict[str, Any]]:
        return [{k: v for k, v in r.to_dict().items() if k != "timestamp"} for r in self.records]

    @classmethod
    def from_jsonl(cls, path: Union[str, Path]) -> "OptimizationTrace":
        path = Path(path)
        try:
            frame = pd.read_json(path, lines=True, dtype=False, convert_dates=False, precise_float=True)
        except ValueError as e:
            raise ConfigurationError(f"Unreadable trace file {path}: {e}")
        if frame.empty:
            return cls()
        return cls([TraceRecord.from_dict(row) for row in frame.to_dict(orient="records")])

    def __str__(self) -> str:
        return f"OptimizationTrace({len(self)} evaluations, incumbent={self.incumbent:.4f})"


class TraceWriter:
    """Appends one JSON record per line and flushes after every write."""

    def __init__(self, path: Optional[Union[str, Path]]) -> None:
        self.path = Path(path) if path is not None else None
        self._handle: Optional[IO[str]] = None

    def __enter__(self) -> "TraceWriter":
        if self.path is not None:
            self._handle = self.path.open("a", encoding="utf-8")
        return self

    def write(self, record: TraceRecord) -> None:
        if self._handle is None:
            return
        self._handle.write(record.to_json() + "\n")
        self._handle.flush()

    def __exit__(self, *exc: Any) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None
