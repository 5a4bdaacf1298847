"""Box-bounded parameter spaces and their unit-cube scaling."""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.stats import qmc

from ..errors import ValidationError

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence]


@dataclass(frozen=True)
class Parameter:
    name: str
    lower: float
    upper: float
    unit: str = ""

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise ValidationError(f"Parameter {self.name!r}: lower bound must be below upper bound")


@dataclass(frozen=True)
class SearchSpace:
    """Ordered box of named parameters."""

    parameters: Tuple[Parameter, ...]

    def __post_init__(self) -> None:
        if not self.parameters:
            raise ValidationError("Search space needs at least one parameter")
        names = [p.name for p in self.parameters]
        if len(set(names)) != len(names):
            raise ValidationError("Parameter names must be unique")

    @classmethod
    def from_bounds(cls, bounds: Dict[str, Sequence[Any]]) -> "SearchSpace":
        """Build from ``{name: (lower, upper[, unit])}``."""
        return cls(tuple(Parameter(name, float(b[0]), float(b[1]), *b[2:3]) for name, b in bounds.items()))

    @property
    def dim(self) -> int:
        return len(self.parameters)

    @property
    def names(self) -> List[str]:
        return [p.name for p in self.parameters]

    @property
    def bounds(self) -> np.ndarray:
        return np.array([[p.lower, p.upper] for p in self.parameters])

    def to_unit(self, x: np.ndarray) -> np.ndarray:
        b = self.bounds
        return (np.asarray(x, dtype=float) - b[:, 0]) / (b[:, 1] - b[:, 0])

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        b = self.bounds
        return b[:, 0] + np.clip(np.asarray(u, dtype=float), 0.0, 1.0) * (b[:, 1] - b[:, 0])

    def contains(self, x: np.ndarray) -> bool:
        b = self.bounds
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= b[:, 0]) and np.all(x <= b[:, 1]))

    def as_dict(self, x: np.ndarray) -> Dict[str, float]:
        return {name: float(v) for name, v in zip(self.names, x)}

    def sobol(self, count: int, seed: SeedLike) -> np.ndarray:
        """First ``count`` points of a scrambled Sobol sequence in the unit cube."""
        if count < 1:
            return np.empty((0, self.dim))
        engine = qmc.Sobol(d=self.dim, scramble=True, seed=np.random.default_rng(seed))
        return engine.random_base2(max(0, math.ceil(math.log2(count))))[:count]

    def to_dict(self) -> Dict[str, Any]:
        return {p.name: [p.lower, p.upper, p.unit] for p in self.parameters}
