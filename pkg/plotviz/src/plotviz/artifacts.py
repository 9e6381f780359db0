"""Strict readers for the run directories the experiment CLI writes.

A run directory contains ``metrics.csv``, ``targets.csv``, one
``particles_<iteration>.csv`` per stored snapshot, and ``run.json``.
Loading validates the column schemas exactly and the cross-file
iteration bookkeeping; any mismatch raises :class:`SchemaError` with the
offending path, so drift between the producing and consuming tools
surfaces immediately instead of as a silently wrong figure.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

METRICS_COLUMNS = ("iter", "mmd", "objective", "clamps", "wallclock_ms")
_SNAPSHOT_NAME = re.compile(r"particles_(\d+)\.csv$")
_REQUIRED_META = ("scenario", "algorithm", "functional", "domain", "seed")


class SchemaError(ValueError):
    """An artifact file exists but does not match the expected schema."""


@dataclass(frozen=True)
class RunArtifacts:
    """Everything one run directory holds, parsed and cross-checked."""

    run_dir: Path
    metrics: dict[str, np.ndarray]
    snapshots: dict[int, np.ndarray]
    targets: np.ndarray
    meta: dict

    @property
    def iterations(self) -> np.ndarray:
        return self.metrics["iter"]

    @property
    def mmds(self) -> np.ndarray:
        return self.metrics["mmd"]

    @property
    def dim(self) -> int:
        return self.targets.shape[1]

    @property
    def algorithm(self) -> str:
        return str(self.meta["algorithm"])

    @property
    def domain(self) -> str:
        return str(self.meta["domain"])


def _read_lines(path: Path) -> list[str]:
    if not path.is_file():
        raise FileNotFoundError(f"missing artifact: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    return lines


def _parse_floats(path: Path, lineno: int, cells: list[str], width: int) -> list[float]:
    if len(cells) != width:
        raise SchemaError(f"{path}:{lineno}: expected {width} columns, got {len(cells)}")
    try:
        return [float(cell) for cell in cells]
    except ValueError:
        raise SchemaError(f"{path}:{lineno}: non-numeric cell") from None


def load_metrics(path: Path) -> dict[str, np.ndarray]:
    lines = _read_lines(path)
    header = tuple(lines[0].split(","))
    if header != METRICS_COLUMNS:
        raise SchemaError(f"{path}: header mismatch: expected "
                          f"{','.join(METRICS_COLUMNS)!r}, got {lines[0]!r}")
    if len(lines) < 2:
        raise SchemaError(f"{path}: no data rows")
    values = np.array([_parse_floats(path, i + 2, line.split(","), len(METRICS_COLUMNS))
                       for i, line in enumerate(lines[1:])])
    metrics = {name: values[:, j] for j, name in enumerate(METRICS_COLUMNS)}
    iters = metrics["iter"]
    if not np.all(iters == np.round(iters)) or iters[0] != 0 or np.any(np.diff(iters) <= 0):
        raise SchemaError(f"{path}: iterations must be integers, start at 0, "
                          "and increase strictly")
    metrics["iter"] = iters.astype(int)
    if np.any(metrics["mmd"] < -1e-12):
        raise SchemaError(f"{path}: negative mmd values")
    return metrics


def load_points(path: Path, id_column: str) -> np.ndarray:
    lines = _read_lines(path)
    header = lines[0].split(",")
    if len(header) < 2 or header[0] != id_column or \
            header[1:] != [f"x{i + 1}" for i in range(len(header) - 1)]:
        raise SchemaError(f"{path}: header mismatch: expected "
                          f"'{id_column},x1..xd', got {lines[0]!r}")
    if len(lines) < 2:
        raise SchemaError(f"{path}: no data rows")
    values = np.array([_parse_floats(path, i + 2, line.split(","), len(header))
                       for i, line in enumerate(lines[1:])])
    ids = values[:, 0]
    if np.any(ids != np.arange(len(ids))):
        raise SchemaError(f"{path}: {id_column} must run 0..n-1 in order")
    return values[:, 1:]


def load_meta(path: Path) -> dict:
    if not path.is_file():
        raise FileNotFoundError(f"missing artifact: {path}")
    try:
        meta = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(meta, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    missing = [key for key in _REQUIRED_META if key not in meta]
    if missing:
        raise SchemaError(f"{path}: missing keys: {', '.join(missing)}")
    return meta


def load_run(run_dir) -> RunArtifacts:
    """Load and cross-validate one run directory."""
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise FileNotFoundError(f"run directory not found: {run_dir}")

    metrics = load_metrics(run_dir / "metrics.csv")
    targets = load_points(run_dir / "targets.csv", "target_id")
    meta = load_meta(run_dir / "run.json")

    snapshots: dict[int, np.ndarray] = {}
    for path in sorted(run_dir.glob("particles_*.csv")):
        match = _SNAPSHOT_NAME.search(path.name)
        if match is None:
            raise SchemaError(f"{path}: malformed snapshot file name")
        snapshots[int(match.group(1))] = load_points(path, "particle_id")
    if not snapshots:
        raise SchemaError(f"{run_dir}: no particle snapshots")

    logged = set(metrics["iter"].tolist())
    final = int(metrics["iter"][-1])
    if 0 not in snapshots:
        raise SchemaError(f"{run_dir}: initial snapshot particles_0.csv is required")
    if final not in snapshots:
        raise SchemaError(f"{run_dir}: final snapshot particles_{final}.csv is required")
    stray = sorted(set(snapshots) - logged)
    if stray:
        raise SchemaError(f"{run_dir}: snapshot iterations {stray} never appear in metrics.csv")

    shapes = {points.shape for points in snapshots.values()}
    if len(shapes) != 1:
        raise SchemaError(f"{run_dir}: snapshots disagree on particle count or dimension")
    dim = next(iter(shapes))[1]
    if dim != targets.shape[1]:
        raise SchemaError(f"{run_dir}: particle dimension {dim} != target dimension "
                          f"{targets.shape[1]}")

    return RunArtifacts(run_dir=run_dir, metrics=metrics, snapshots=snapshots,
                        targets=targets, meta=meta)
