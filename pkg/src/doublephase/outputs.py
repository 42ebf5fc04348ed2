"""Serialized outputs: field/history CSV, JSON reports, and the run manifest.

All payload files are deterministic for a fixed config and seed (floats are
written with shortest round-trip repr).  The manifest carries a timestamp and
the payload checksums; it is the one file that differs between identical runs.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, is_dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import FieldShapeError
from .grid import DomainGrid, GridFunction

__all__ = [
    "write_field_csv",
    "read_field_csv",
    "write_history_csv",
    "write_path_profile_csv",
    "write_matrix_csv",
    "write_json",
    "sha256_of",
    "write_manifest",
    "jsonable",
]

VERSION = "0.1.0"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_field_csv(path: Path, u: GridFunction) -> Path:
    """One node per row in lexicographic index order, coordinates first."""
    grid = u.grid
    mesh = grid.node_mesh()
    header = ",".join(f"x{k + 1}" for k in range(grid.dim)) + ",value"
    flat = [m.reshape(-1) for m in mesh] + [u.values.reshape(-1)]
    lines = [header]
    for row in zip(*flat):
        lines.append(",".join(_fmt(x) for x in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_field_csv(path: Path, grid: DomainGrid, bc_zero: bool = False) -> GridFunction:
    """Re-ingest a field CSV; the node count must match the grid."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise FieldShapeError(f"{path}: empty field file")
    rows = lines[1:] if lines[0][0].isalpha() else lines
    if len(rows) != grid.node_count:
        raise FieldShapeError(
            f"{path}: {len(rows)} rows but the grid has {grid.node_count} nodes"
        )
    vals = np.empty(grid.node_count)
    want = grid.dim + 1
    for i, row in enumerate(rows):
        parts = row.split(",")
        if len(parts) != want:
            raise FieldShapeError(f"{path}: row {i + 2} has {len(parts)} columns, want {want}")
        vals[i] = float(parts[-1])
    return GridFunction(grid, vals.reshape(grid.node_shape), bc_zero=bc_zero)


def write_history_csv(path: Path, history) -> Path:
    lines = ["iteration,energy,residual"]
    for i, (energy, residual) in enumerate(history):
        lines.append(f"{i},{_fmt(energy)},{_fmt(residual)}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_path_profile_csv(path: Path, snapshots) -> Path:
    """Long-format path energies: one row per (snapshot iteration, path index)."""
    lines = ["iteration,k,energy"]
    for it, energies in snapshots:
        for k, e in enumerate(energies):
            lines.append(f"{it},{k},{_fmt(e)}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_matrix_csv(path: Path, matrix: np.ndarray) -> Path:
    lines = [",".join(f"u{j}" for j in range(matrix.shape[1]))]
    for row in matrix:
        lines.append(",".join(_fmt(x) for x in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def jsonable(obj):
    """Recursively convert dataclasses/ndarrays to plain JSON types."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, config_echo: dict, hypothesis_reports, extra: dict | None = None) -> Path:
    """Checksum every payload file already present in the output directory."""
    out_dir = Path(out_dir)
    checksums = {
        p.name: sha256_of(p)
        for p in sorted(out_dir.iterdir())
        if p.is_file() and p.name != "manifest.json"
    }
    manifest = {
        "version": VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": jsonable(config_echo),
        "hypothesis_reports": jsonable(hypothesis_reports),
        "outputs": checksums,
    }
    if extra:
        manifest.update(jsonable(extra))
    return write_json(out_dir / "manifest.json", manifest)
