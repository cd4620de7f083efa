"""Frozen CSV/JSON output formats and the run manifest.

All CSV files start with ``#``-prefixed comment lines carrying the schema
version, the seed, and the config digest, followed by a header row.  Floats
are serialised with 17 significant digits so runs reproduce byte-identically
across platforms and thread counts.  Every run directory gets a
``run_manifest.json`` listing the emitted files with SHA-256 digests (the
manifest also records wall time, so it is the one file excluded from
byte-identity comparisons).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .processes import Trajectory

SCHEMA_VERSION = "1"


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def _comment_lines(meta: dict) -> list[str]:
    lines = [f"# sgldiff-csv v{SCHEMA_VERSION}"]
    for key in sorted(meta):
        lines.append(f"# {key}={meta[key]}")
    return lines


def write_table_csv(
    path: Path,
    header: Sequence[str],
    columns: Sequence[np.ndarray],
    meta: dict | None = None,
) -> Path:
    """Columnar table with comment header; all columns must share a length."""
    path = Path(path)
    columns = [np.asarray(c) for c in columns]
    if len(columns) != len(header):
        raise ValueError("header and columns length mismatch")
    n = len(columns[0]) if columns else 0
    if any(len(c) != n for c in columns):
        raise ValueError("columns must have equal lengths")
    with open(path, "w", newline="\n") as fh:
        for line in _comment_lines(meta or {}):
            fh.write(line + "\n")
        fh.write(",".join(header) + "\n")
        for k in range(n):
            fields = []
            for c in columns:
                v = c[k]
                if np.issubdtype(np.asarray(v).dtype, np.integer):
                    fields.append(str(int(v)))
                else:
                    fields.append(format_float(float(v)))
            fh.write(",".join(fields) + "\n")
    return path


def write_trajectory_csv(
    path: Path,
    traj: Trajectory,
    meta: dict | None = None,
    t_max: float | None = None,
    eta_column: float | None = None,
) -> Path:
    """Trajectory rows ``t,x_0..x_{d-1},index`` (index -1 when unswitched).

    ``t_max`` truncates to an initial window; ``eta_column`` prepends a
    constant ``eta`` column for row-grouped multi-rate files.
    """
    keep = slice(None) if t_max is None else traj.times <= t_max
    times = traj.times[keep]
    points = traj.points[keep]
    if traj.index_annotation is None:
        index = np.full(len(times), -1, dtype=np.int64)
    else:
        index = traj.index_annotation[keep]
    header = ["t"] + [f"x_{j}" for j in range(traj.dim)] + ["index"]
    columns = [times] + [points[:, j] for j in range(traj.dim)] + [index]
    if eta_column is not None:
        header = ["eta"] + header
        columns = [np.full(len(times), eta_column)] + columns
    base_meta = {"kind": "trajectory", "seed": traj.seed, "config": traj.config_digest}
    base_meta.update(meta or {})
    return write_table_csv(path, header, columns, base_meta)


def append_rows_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence], meta: dict) -> Path:
    """Create-or-append variant used for row-grouped files written per eta."""
    path = Path(path)
    new = not path.exists()
    with open(path, "a", newline="\n") as fh:
        if new:
            for line in _comment_lines(meta):
                fh.write(line + "\n")
            fh.write(",".join(header) + "\n")
        for row in rows:
            fields = [
                str(v) if isinstance(v, (int, np.integer)) else format_float(v)
                for v in row
            ]
            fh.write(",".join(fields) + "\n")
    return path


def write_json(path: Path, payload: dict) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(
    out_dir: Path,
    command: str,
    config_payload: dict,
    files: Sequence[Path],
    wall_time_s: float,
    version: str,
) -> Path:
    entries = [
        {"name": Path(f).name, "sha256": sha256_file(f)} for f in sorted(files)
    ]
    payload = {
        "tool": "sgldiff",
        "version": version,
        "command": command,
        "config": config_payload,
        "wall_time_s": wall_time_s,
        "files": entries,
    }
    return write_json(Path(out_dir) / "run_manifest.json", payload)


def read_table_csv(path: Path) -> tuple[dict, list[str], dict[str, np.ndarray]]:
    """Parse a table written by :func:`write_table_csv` (tests and plotting)."""
    meta: dict = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None:
        raise ValueError(f"no header row in {path}")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    columns = {name: data[:, j] for j, name in enumerate(header)}
    return meta, header, columns
