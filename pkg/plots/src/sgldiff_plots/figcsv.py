"""Readers for the frozen sgldiff CSV schemas.

Every input is a comma-separated table preceded by ``#`` comment lines.
Readers validate the expected columns and raise :class:`SchemaError`
naming the offending column; the plotting layer never recomputes
statistics, it only draws what the columns contain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_COLORS = {
    "index0": "black",
    "index1": "teal",
    "target": "blue",
    "histogram": "gray",
}


class SchemaError(ValueError):
    """An input CSV does not match the frozen schema."""


@dataclass
class FigureSpec:
    """Inputs and style for one rendered figure.

    Panels are laid out one row per learning rate (path on the left,
    densities on the right).
    """

    input_dir: Path
    out_path: Path
    fmt: str = "png"
    colors: dict = field(default_factory=lambda: dict(DEFAULT_COLORS))
    dpi: int = 150
    row_size: tuple[float, float] = (10.0, 2.6)

    def __post_init__(self):
        self.input_dir = Path(self.input_dir)
        self.out_path = Path(self.out_path)
        if self.fmt not in ("png", "svg"):
            raise SchemaError(f"unsupported format {self.fmt!r} (png or svg)")


def read_csv_columns(path: Path, required: list[str]) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"missing input file: {path.name}")
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None:
        raise SchemaError(f"{path.name}: no header row")
    for col in required:
        if col not in header:
            raise SchemaError(f"{path.name}: missing column {col!r}")
    try:
        data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    except ValueError as exc:
        raise SchemaError(f"{path.name}: non-numeric cell ({exc})") from exc
    if data.shape[1] != len(header):
        raise SchemaError(f"{path.name}: ragged rows")
    return {name: data[:, j] for j, name in enumerate(header)}


def split_by_eta(columns: dict[str, np.ndarray]) -> list[tuple[float, dict]]:
    """Row groups by the ``eta`` column, in first-appearance order."""
    if "eta" not in columns:
        raise SchemaError("missing column 'eta'")
    etas = columns["eta"]
    order: list[float] = []
    for v in etas:
        if v not in order:
            order.append(float(v))
    groups = []
    for eta in order:
        mask = etas == eta
        groups.append((eta, {k: v[mask] for k, v in columns.items()}))
    return groups
