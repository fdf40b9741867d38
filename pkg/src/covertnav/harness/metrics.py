"""Metric computation over episode logs and the multi-policy comparison grid."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import EmptyInputError
from ..navenv import EnvConfig, NavEnv
from ..world import StepEvent
from .episodes import EpisodeLog, run_episode


def success(log: EpisodeLog) -> bool:
    """Goal reached within the step limit, with no collision."""
    return log.terminal_event is StepEvent.GOAL_REACHED


def trajectory_length(log: EpisodeLog) -> float:
    """Path length in meters: sum of consecutive planar displacements."""
    if not log.records:
        raise EmptyInputError("episode log has no records")
    total = 0.0
    for prev, cur in zip(log.records, log.records[1:]):
        total += math.hypot(cur.state.x - prev.state.x, cur.state.y - prev.state.y)
    return total


def in_cover_ratio(log: EpisodeLog) -> float:
    """Fraction of this episode's records at which the robot was in cover."""
    return sum(1 for r in log.records if r.cover.is_cover) / len(log.records)


def cumulative_elevation_change(log: EpisodeLog) -> float:
    """Sum of absolute elevation changes along the trajectory."""
    return sum(
        abs(cur.state.z - prev.state.z) for prev, cur in zip(log.records, log.records[1:])
    )


@dataclass(frozen=True)
class Metrics:
    success_rate: float  # percent
    mean_trajectory_length: float  # meters
    mean_execution_time: float  # wall-clock seconds
    mean_sim_time: float  # simulated seconds (steps * dt)
    in_cover_ratio: float  # pooled over all steps of all episodes
    mean_elevation_change: float  # meters of accumulated |dz| per episode


def aggregate(logs: list[EpisodeLog] | tuple[EpisodeLog, ...]) -> Metrics:
    if not logs:
        raise EmptyInputError("cannot aggregate zero episodes")
    total_records = sum(len(log.records) for log in logs)
    covered = sum(sum(1 for r in log.records if r.cover.is_cover) for log in logs)
    return Metrics(
        success_rate=100.0 * sum(success(log) for log in logs) / len(logs),
        mean_trajectory_length=float(np.mean([trajectory_length(log) for log in logs])),
        mean_execution_time=float(np.mean([log.duration_s for log in logs])),
        mean_sim_time=float(np.mean([log.sim_time_s for log in logs])),
        in_cover_ratio=covered / total_records,
        mean_elevation_change=float(np.mean([cumulative_elevation_change(log) for log in logs])),
    )


@dataclass(frozen=True)
class ReportCell:
    policy: str
    scenario: str
    episodes: int
    metrics: Metrics


@dataclass(frozen=True)
class Report:
    seed: int
    cells: tuple[ReportCell, ...]


def compare(
    policies: dict[str, Callable[[np.random.Generator], object]],
    scenarios: dict[str, tuple],
    episodes_per_cell: int,
    seed: int,
    config: EnvConfig = EnvConfig(),
    clock=time.perf_counter,
    start_zone=None,
    goal_fn=None,
    collect_logs: dict[tuple[str, str], list[EpisodeLog]] | None = None,
) -> Report:
    """One Metrics row per (policy, scenario) cell.

    policies maps names to factories taking a per-cell rng; scenarios maps
    names to (grid, objects, spec) triples. Episode rng streams derive from
    (seed, policy index, scenario index, episode index), so the report is a
    pure function of its arguments aside from the injectable clock.
    """
    if episodes_per_cell < 1:
        raise EmptyInputError("episodes_per_cell must be at least 1")
    cells = []
    for p_idx, (policy_name, factory) in enumerate(policies.items()):
        for s_idx, (scenario_name, (grid, objects, spec)) in enumerate(scenarios.items()):
            logs = []
            for ep in range(episodes_per_cell):
                env_rng = np.random.default_rng(
                    np.random.SeedSequence(entropy=(seed, p_idx, s_idx, ep))
                )
                policy_rng = np.random.default_rng(
                    np.random.SeedSequence(entropy=(seed, p_idx, s_idx, ep, 1))
                )
                env = NavEnv(
                    grid, objects, env_rng, config, start_zone=start_zone, goal_fn=goal_fn
                )
                policy = factory(policy_rng)
                logs.append(
                    run_episode(
                        policy,
                        env,
                        scenario_id=scenario_name,
                        seed=seed,
                        clock=clock,
                        scenario_spec=spec,
                    )
                )
            if collect_logs is not None:
                collect_logs[(policy_name, scenario_name)] = logs
            cells.append(
                ReportCell(
                    policy=policy_name,
                    scenario=scenario_name,
                    episodes=episodes_per_cell,
                    metrics=aggregate(logs),
                )
            )
    return Report(seed=seed, cells=tuple(cells))


def format_report(report: Report) -> str:
    """Human-readable fixed-width table of the comparison grid."""
    headers = (
        "policy",
        "scenario",
        "episodes",
        "success %",
        "traj len m",
        "exec s",
        "sim s",
        "in-cover",
        "|dz| m",
    )
    rows = [headers]
    for cell in report.cells:
        m = cell.metrics
        rows.append(
            (
                cell.policy,
                cell.scenario,
                str(cell.episodes),
                f"{m.success_rate:.1f}",
                f"{m.mean_trajectory_length:.2f}",
                f"{m.mean_execution_time:.3f}",
                f"{m.mean_sim_time:.1f}",
                f"{m.in_cover_ratio:.3f}",
                f"{m.mean_elevation_change:.3f}",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
