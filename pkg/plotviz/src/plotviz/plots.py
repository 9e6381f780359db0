"""Figure rendering from run artifacts.

Figures are built on bare ``matplotlib.figure.Figure`` objects, never
pyplot, so rendering is headless, stateless, and deterministic: fixed
figure geometry, no timestamps, output controlled entirely by the input
artifacts.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .artifacts import RunArtifacts, load_run

TARGET_COLOR = "tab:green"
INITIAL_COLOR = "tab:blue"
FINAL_COLOR = "tab:red"
TRAJECTORY_COLOR = "0.78"
OUTLINE_COLOR = "0.35"

_FIGSIZE = (6.0, 6.0)
_DPI = 110


def _draw_outline(ax, domain: str) -> None:
    """Domain boundary for context: unit circle or simplex edge triangle."""
    if domain == "ball":
        angle = np.linspace(0.0, 2.0 * np.pi, 361)
        ax.plot(np.cos(angle), np.sin(angle), color=OUTLINE_COLOR,
                linewidth=1.0, gid="outline")
        ax.set_xlim(-1.15, 1.15)
        ax.set_ylim(-1.15, 1.15)
    else:
        corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        ax.plot(corners[:, 0], corners[:, 1], color=OUTLINE_COLOR,
                linewidth=1.0, gid="outline")
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.0)


def render_trajectories(artifacts: RunArtifacts) -> Figure:
    """Scatter of target/initial/final particle sets in the first two
    coordinates, with faint per-particle polylines through intermediate
    snapshots when the run stored any."""
    fig = Figure(figsize=_FIGSIZE, dpi=_DPI)
    ax = fig.add_subplot()

    iterations = sorted(artifacts.snapshots)
    if len(iterations) > 2:
        stack = np.stack([artifacts.snapshots[it][:, :2] for it in iterations])
        for particle in range(stack.shape[1]):
            ax.plot(stack[:, particle, 0], stack[:, particle, 1],
                    color=TRAJECTORY_COLOR, linewidth=0.6, zorder=1,
                    gid="trajectory")

    ax.scatter(artifacts.targets[:, 0], artifacts.targets[:, 1], s=12,
               color=TARGET_COLOR, alpha=0.7, zorder=2, label="target")
    initial = artifacts.snapshots[iterations[0]]
    final = artifacts.snapshots[iterations[-1]]
    ax.scatter(initial[:, 0], initial[:, 1], s=14, color=INITIAL_COLOR,
               zorder=3, label="initial")
    ax.scatter(final[:, 0], final[:, 1], s=14, color=FINAL_COLOR,
               zorder=4, label="final")

    _draw_outline(ax, artifacts.domain)
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"{artifacts.meta['scenario']}: {artifacts.algorithm} / "
                 f"{artifacts.meta['functional']}")
    ax.legend(loc="upper right", framealpha=0.9)
    return fig


def render_convergence(artifact_list: list[RunArtifacts], log_y: bool = False) -> Figure:
    """MMD against iteration, one labeled curve per run."""
    fig = Figure(figsize=_FIGSIZE, dpi=_DPI)
    ax = fig.add_subplot()
    for artifacts in artifact_list:
        ax.plot(artifacts.iterations, artifacts.mmds, linewidth=1.4,
                label=artifacts.algorithm)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mmd")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


def _save(fig: Figure, out_path) -> Path:
    out = Path(out_path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    return out


def plot_trajectories(run_dir, out_path) -> Path:
    """Load one run directory and write its trajectory panel."""
    return _save(render_trajectories(load_run(run_dir)), out_path)


def plot_convergence(run_dirs, out_path, log_y: bool = False) -> Path:
    """Load one or more run directories and write the comparison curves."""
    artifact_list = [load_run(run_dir) for run_dir in run_dirs]
    return _save(render_convergence(artifact_list, log_y=log_y), out_path)
