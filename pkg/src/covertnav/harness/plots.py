"""Figure rendering for trajectories, learning curves, and comparison reports.

All figures render to files through the Agg backend; nothing opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Circle

from ..objects import CoverObject
from ..terrain import ElevationGrid
from ..world import StepEvent
from .episodes import EpisodeLog
from .metrics import Report

_EVENT_COLORS = {
    StepEvent.GOAL_REACHED: "tab:blue",
    StepEvent.COLLISION: "tab:red",
    StepEvent.NONE: "tab:gray",
}


def plot_trajectories(
    grid: ElevationGrid,
    objects: tuple[CoverObject, ...],
    logs: list[EpisodeLog],
    path: str | Path,
    title: str | None = None,
) -> None:
    """Overlay episode paths on the elevation map with object footprints."""
    fig, ax = plt.subplots(figsize=(7, 6))
    extent = (grid.origin[0], grid.x_max, grid.origin[1], grid.y_max)
    im = ax.imshow(
        grid.height_map, origin="lower", extent=extent, cmap="terrain", alpha=0.8
    )
    fig.colorbar(im, ax=ax, label="elevation (m)", shrink=0.85)
    for obj in objects:
        ax.add_patch(
            Circle(
                (obj.position[0], obj.position[1]),
                obj.footprint_radius,
                facecolor="forestgreen",
                edgecolor="black",
                linewidth=0.5,
                alpha=0.75,
            )
        )
    for log in logs:
        xs = [r.state.x for r in log.records]
        ys = [r.state.y for r in log.records]
        color = _EVENT_COLORS[log.terminal_event]
        ax.plot(xs, ys, color=color, linewidth=1.2, alpha=0.9)
        ax.plot(xs[0], ys[0], marker="o", color=color, markersize=4)
    if logs:
        # goal of the first episode as reference
        first = logs[0]
        ax.plot(
            first.records[-1].state.x,
            first.records[-1].state.y,
            marker="x",
            color="black",
            markersize=6,
        )
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(title or "trajectories (blue: goal, red: collision, gray: timeout)")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_learning_curve(returns: list[float], path: str | Path, window: int = 10) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    episodes = np.arange(len(returns))
    ax.plot(episodes, returns, color="tab:blue", alpha=0.4, label="episode return")
    if len(returns) >= window:
        kernel = np.ones(window) / window
        smooth = np.convolve(returns, kernel, mode="valid")
        ax.plot(
            episodes[window - 1 :],
            smooth,
            color="tab:blue",
            linewidth=2,
            label=f"{window}-episode mean",
        )
    ax.set_xlabel("episode")
    ax.set_ylabel("return")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_report(report: Report, path: str | Path) -> None:
    """Grouped bars per scenario for the three headline metrics plus cover ratio."""
    policies = sorted({c.policy for c in report.cells})
    scenarios = sorted({c.scenario for c in report.cells})
    lookup = {(c.policy, c.scenario): c.metrics for c in report.cells}
    panels = (
        ("success rate (%)", lambda m: m.success_rate),
        ("trajectory length (m)", lambda m: m.mean_trajectory_length),
        ("execution time (s)", lambda m: m.mean_execution_time),
        ("in-cover ratio", lambda m: m.in_cover_ratio),
    )
    fig, axes = plt.subplots(2, 2, figsize=(11, 7))
    width = 0.8 / max(len(policies), 1)
    x = np.arange(len(scenarios))
    for ax, (label, getter) in zip(axes.reshape(-1), panels):
        for i, policy in enumerate(policies):
            values = [
                getter(lookup[(policy, s)]) if (policy, s) in lookup else 0.0
                for s in scenarios
            ]
            ax.bar(x + i * width, values, width=width, label=policy)
        ax.set_xticks(x + width * (len(policies) - 1) / 2)
        ax.set_xticklabels(scenarios, rotation=15, ha="right", fontsize=8)
        ax.set_ylabel(label)
        ax.grid(True, axis="y", alpha=0.3)
    axes[0, 0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
