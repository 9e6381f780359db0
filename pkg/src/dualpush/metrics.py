"""Run metrics: RBF kernels, MMD, the early-stop rule, and run records."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .exceptions import DegenerateError, DimensionError

COMPLETED = "completed"
EARLY_STOPPED = "early_stopped"
ABORTED = "aborted"


@dataclass(frozen=True)
class Kernel:
    """An RBF kernel ``k(x, x') = exp(-||x - x'||^2 / (2 bandwidth^2))``."""

    kind: str = "rbf"
    bandwidth: float = 1.0

    def __post_init__(self) -> None:
        if self.kind != "rbf":
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not self.bandwidth > 0.0:
            raise ValueError("bandwidth must be positive")

    def gram(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_2d(np.asarray(y, dtype=float))
        sq = cdist(x, y, "sqeuclidean")
        return np.exp(-sq / (2.0 * self.bandwidth**2))


def _check_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape[0] == 0 or y.shape[0] == 0:
        raise DegenerateError("empty sample set")
    if x.shape[1] != y.shape[1]:
        raise DimensionError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    return x, y


def mmd2(x: np.ndarray, y: np.ndarray, kernel: Kernel) -> float:
    """Squared MMD, biased V-statistic (diagonal terms included).

    Always >= 0 up to roundoff; 0 when the two sets coincide.
    """
    x, y = _check_pair(x, y)
    return float(np.mean(kernel.gram(x, x)) + np.mean(kernel.gram(y, y)) - 2.0 * np.mean(kernel.gram(x, y)))


def median_heuristic(x: np.ndarray, y: np.ndarray) -> float:
    """Median pairwise distance over the pooled set; fixed once per run."""
    x, y = _check_pair(x, y)
    pooled = np.vstack([x, y])
    if pooled.shape[0] < 2:
        raise DegenerateError("median heuristic needs at least 2 points")
    med = float(np.median(pdist(pooled)))
    if med <= 0.0:
        raise DegenerateError("pooled points are all identical; bandwidth would be 0")
    return med


@dataclass(frozen=True)
class RunStatus:
    """Terminal state of a run: completed, early_stopped (with the stop
    iteration), or aborted (with a reason)."""

    kind: str
    at: int | None = None
    reason: str | None = None

    @classmethod
    def completed(cls) -> "RunStatus":
        return cls(COMPLETED)

    @classmethod
    def early_stopped(cls, at: int) -> "RunStatus":
        return cls(EARLY_STOPPED, at=at)

    @classmethod
    def aborted(cls, reason: str) -> "RunStatus":
        return cls(ABORTED, reason=reason)


@dataclass(frozen=True)
class HistoryRow:
    """One logged iteration. ``iteration`` 0 is the pre-update baseline."""

    iteration: int
    mmd: float
    objective: float
    clamps: int
    wallclock_ms: float


@dataclass
class RunHistory:
    """Append-only record of a transport run.

    ``snapshots`` holds ``(iteration, points)`` pairs. ``wallclock_ms`` in
    the rows is the measured per-iteration time; serialization may redact
    it to keep emitted files reproducible (see the cli module).
    """

    rows: list[HistoryRow] = field(default_factory=list)
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    status: RunStatus | None = None
    bandwidth: float = float("nan")
    final_points: np.ndarray | None = None
    interior_fraction_min: float = 1.0

    @property
    def mmds(self) -> np.ndarray:
        return np.array([row.mmd for row in self.rows])

    @property
    def final_mmd(self) -> float:
        if not self.rows:
            raise DegenerateError("history has no rows")
        return self.rows[-1].mmd

    @property
    def n_updates(self) -> int:
        """Number of update iterations recorded (excludes the baseline row)."""
        return self.rows[-1].iteration if self.rows else 0


def should_stop(history, patience: int) -> bool:
    """True when the best MMD so far is older than ``patience`` iterations.

    The best is the first occurrence of the running minimum, so later ties
    do not reset the counter. Accepts a RunHistory or a plain sequence of
    MMD values (one per logged iteration).
    """
    if patience < 1:
        raise ValueError("patience must be >= 1")
    mmds = history.mmds if isinstance(history, RunHistory) else np.asarray(list(history), dtype=float)
    if mmds.size == 0:
        return False
    best = int(np.argmin(mmds))
    return (mmds.size - 1 - best) > patience
