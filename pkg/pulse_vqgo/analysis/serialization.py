"""Text and JSON formats for process matrices and zero-fidelity plans."""

import json
from pathlib import Path
from typing import Any, List, Mapping, Optional, Union

import numpy as np
import pandas as pd
from typing_extensions import TypeAlias

from ..errors import ConfigurationError
from ..models.process import ProcessMatrix, ZeroFidelityPlan, normalize_label

PathLike: TypeAlias = Union[str, Path]

CHI_COLUMNS = ["row", "col", "re", "im"]


def header_lines(header: Optional[Mapping[str, Any]]) -> List[str]:
    """``# key=value`` comment lines; non-string values as compact JSON."""
    if not header:
        return []
    return [
        f"# {key}=" + (value if isinstance(value, str) else json.dumps(value, sort_keys=True, separators=(",", ":")))
        for key, value in header.items()
    ]


def format_chi(chi: ProcessMatrix, atol: float = 0.0, header: Optional[Mapping[str, Any]] = None) -> str:
    """
    Render chi as ``# n=``/``# labels=`` headers, any run header lines, then
    one ``<row> <col> <re> <im>`` line per element with |chi_ij| > atol.
    """
    labels = chi.labels
    lines = [f"# n={chi.n}", "# labels=" + ",".join(labels), *header_lines(header)]
    for r, row in enumerate(labels):
        for c, col in enumerate(labels):
            value = chi.chi[r, c]
            if abs(value) > atol:
                lines.append(f"{row} {col} {value.real:.17g} {value.imag:.17g}")
    return "\n".join(lines) + "\n"


def write_chi(
    chi: ProcessMatrix, path: PathLike, atol: float = 0.0, header: Optional[Mapping[str, Any]] = None
) -> Path:
    path = Path(path)
    path.write_text(format_chi(chi, atol, header), encoding="utf-8")
    return path


def write_table(frame: pd.DataFrame, path: PathLike, header: Optional[Mapping[str, Any]] = None) -> Path:
    """Comma-separated table behind ``#`` header lines; read back with ``comment="#"``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for line in header_lines(header):
            handle.write(line + "\n")
        frame.to_csv(handle, index=False)
    return path


def chi_table(chi: ProcessMatrix) -> pd.DataFrame:
    """Long-format table of every chi element with its magnitude."""
    labels = chi.labels
    rows, cols = np.meshgrid(range(len(labels)), range(len(labels)), indexing="ij")
    values = chi.chi.ravel()
    return pd.DataFrame(
        {
            "row": [labels[i] for i in rows.ravel()],
            "col": [labels[j] for j in cols.ravel()],
            "re": values.real,
            "im": values.imag,
            "abs": np.abs(values),
        }
    )


def read_chi(path: PathLike) -> ProcessMatrix:
    """Parse a ``*.chi.txt`` file back into a ProcessMatrix."""
    path = Path(path)
    n = None
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if line.startswith("# n="):
                n = int(line.strip()[4:])
                break
    if n is None:
        raise ConfigurationError(f"{path} has no '# n=' header")
    matrix = ProcessMatrix(n=n, chi=np.zeros((4**n, 4**n), dtype=complex))
    try:
        frame = pd.read_csv(
            path,
            sep=r"\s+",
            comment="#",
            header=None,
            names=CHI_COLUMNS,
            dtype={"row": str, "col": str},
            float_precision="round_trip",
        )
    except pd.errors.EmptyDataError:
        return matrix
    for row, col, re, im in frame.itertuples(index=False):
        matrix.chi[matrix.index(normalize_label(row)), matrix.index(normalize_label(col))] = complex(re, im)
    return matrix


def save_plan(plan: ZeroFidelityPlan, path: PathLike, header: Optional[Mapping[str, Any]] = None) -> Path:
    """Plan as JSON; a run header goes under ``"run"`` and is ignored on load."""
    path = Path(path)
    data = plan.to_dict()
    if header:
        data["run"] = dict(header)
    path.write_text(json.dumps(data, indent=2, sort_keys=True), encoding="utf-8")
    return path


def load_plan(path: PathLike) -> ZeroFidelityPlan:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot load zero-fidelity plan {path}: {e}")
    return ZeroFidelityPlan.from_dict(data)
