"""Figure generation for stored particle-transport runs.

Reads the CSV/JSON artifacts a run directory contains (metrics.csv,
targets.csv, particles_<iter>.csv snapshots, run.json) and renders
trajectory and convergence figures. This package never imports the
engine that produced the artifacts; files on disk are the interface.
"""

from .artifacts import (
    METRICS_COLUMNS,
    RunArtifacts,
    SchemaError,
    load_meta,
    load_metrics,
    load_points,
    load_run,
)
from .plots import (
    plot_convergence,
    plot_trajectories,
    render_convergence,
    render_trajectories,
)

__version__ = "0.1.0"

__all__ = [
    "METRICS_COLUMNS",
    "RunArtifacts",
    "SchemaError",
    "load_meta",
    "load_metrics",
    "load_points",
    "load_run",
    "plot_convergence",
    "plot_trajectories",
    "render_convergence",
    "render_trajectories",
    "__version__",
]
