"""Every file surface the harness reads or writes.

Formats: scenario JSON (kind, seed, extent_m, cell_size_m, heights row-major,
objects[]), full-fidelity episode-log JSON, the per-step trajectory CSV,
the learning-curve two-column CSV, and the comparison report as JSON and CSV.
Infinite cover distances serialize as null.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..objects import CoverClass, CoverObject
from ..perception import CoverVerdict
from ..reward import RewardBreakdown
from ..terrain import ElevationGrid, ScenarioKind, ScenarioSpec, generate_scenario
from ..world import RobotState, StepEvent
from .episodes import EpisodeLog, StepRecord
from .metrics import Metrics, Report, ReportCell

TRAJECTORY_COLUMNS = (
    "tick",
    "x",
    "y",
    "z",
    "heading",
    "v",
    "omega",
    "roll",
    "pitch",
    "r_goal",
    "r_dir",
    "r_stab",
    "r_elev",
    "r_cover",
    "total",
    "is_cover",
    "event",
)


@dataclass(frozen=True)
class ScenarioBundle:
    """A loaded or generated scenario ready to run."""

    name: str
    spec: ScenarioSpec | None
    grid: ElevationGrid
    objects: tuple[CoverObject, ...]


def make_scenario(spec: ScenarioSpec, name: str | None = None) -> ScenarioBundle:
    grid, objects = generate_scenario(spec)
    return ScenarioBundle(
        name=name or f"{spec.kind.value}@{spec.seed}",
        spec=spec,
        grid=grid,
        objects=objects,
    )


def make_corridor_scenario(seed: int = 0, name: str = "cover_corridor") -> ScenarioBundle:
    """Low-elevation terrain with a hand-placed bush corridor flanking the
    first leg of the spawn-to-goal route; used by the cover-following check.

    The bushes sit 2.5 m off the centerline so a straight run passes between
    them, and they end well before the 12 m goal band so a goal-directed
    policy leaves cover behind while a cover-seeking one can linger.
    """
    from ..terrain import elevation_at

    spec = ScenarioSpec(ScenarioKind.LOW_ELEVATION, seed=seed, object_density=0.0)
    grid, _ = generate_scenario(spec)
    bushes = []
    object_id = 1
    for x in (17.5, 20.5, 23.5):
        for y in (17.5, 22.5):
            bushes.append(
                CoverObject(
                    object_id=object_id,
                    class_name=CoverClass.BUSH,
                    position=(x, y, elevation_at(grid, x, y)),
                    footprint_radius=0.3,
                    obj_height=1.5,
                )
            )
            object_id += 1
    return ScenarioBundle(name=name, spec=None, grid=grid, objects=tuple(bushes))


def corridor_goal_fn(world):
    """Goal placement for the corridor evaluation: 10.5 m east of the spawn
    with a little lateral jitter, always inside the 12 m goal radius."""
    jitter = float(world.rng.uniform(-1.5, 1.5))
    return world.robot.x + 10.5, world.robot.y + jitter


def save_scenario(bundle: ScenarioBundle, path: str | Path) -> None:
    spec = bundle.spec
    payload = {
        "kind": spec.kind.value if spec else None,
        "seed": spec.seed if spec else 0,
        "extent_m": spec.extent_m if spec else bundle.grid.x_max - bundle.grid.origin[0],
        "cell_size_m": bundle.grid.cell_size,
        "object_density_per_100m2": spec.object_density if spec else None,
        "heights": bundle.grid.heights.tolist(),
        "objects": [
            {
                "object_id": o.object_id,
                "class_name": o.class_name.value,
                "x": o.position[0],
                "y": o.position[1],
                "z": o.position[2],
                "footprint_radius": o.footprint_radius,
                "obj_height": o.obj_height,
            }
            for o in bundle.objects
        ],
    }
    Path(path).write_text(json.dumps(payload))


def load_scenario(path: str | Path) -> ScenarioBundle:
    data = json.loads(Path(path).read_text())
    cell = float(data["cell_size_m"])
    heights = np.asarray(data["heights"], dtype=float)
    nodes = int(round(math.sqrt(len(heights))))
    grid = ElevationGrid(nodes, nodes, cell, (0.0, 0.0), heights)
    objects = tuple(
        CoverObject(
            object_id=int(o["object_id"]),
            class_name=CoverClass(o["class_name"]),
            position=(float(o["x"]), float(o["y"]), float(o["z"])),
            footprint_radius=float(o["footprint_radius"]),
            obj_height=float(o["obj_height"]),
        )
        for o in data["objects"]
    )
    spec = None
    if data.get("kind"):
        spec = ScenarioSpec(
            kind=ScenarioKind(data["kind"]),
            seed=int(data["seed"]),
            extent_m=float(data["extent_m"]),
            object_density=float(data["object_density_per_100m2"]),
            cell_size=cell,
        )
    name = Path(path).stem
    return ScenarioBundle(name=name, spec=spec, grid=grid, objects=objects)


def _finite_or_none(x: float) -> float | None:
    return None if math.isinf(x) else x


def episode_log_to_dict(log: EpisodeLog) -> dict:
    return {
        "scenario_id": log.scenario_id,
        "seed": log.seed,
        "terminal_event": log.terminal_event.value,
        "duration_s": log.duration_s,
        "dt": log.dt,
        "scenario_spec": None
        if log.scenario_spec is None
        else {
            "kind": log.scenario_spec.kind.value,
            "seed": log.scenario_spec.seed,
            "extent_m": log.scenario_spec.extent_m,
            "object_density": log.scenario_spec.object_density,
            "cell_size": log.scenario_spec.cell_size,
        },
        "records": [
            {
                "tick": r.tick,
                "state": {
                    "x": r.state.x,
                    "y": r.state.y,
                    "z": r.state.z,
                    "heading": r.state.heading,
                    "v": r.state.v,
                    "omega": r.state.omega,
                    "roll": r.state.roll,
                    "pitch": r.state.pitch,
                },
                "command": list(r.command),
                "reward": {
                    "r_goal": r.reward.r_goal,
                    "r_dir": r.reward.r_dir,
                    "r_stab": r.reward.r_stab,
                    "r_elev": r.reward.r_elev,
                    "r_cover": r.reward.r_cover,
                    "total": r.reward.total,
                },
                "cover": {
                    "is_cover": r.cover.is_cover,
                    "cover_distance": _finite_or_none(r.cover.cover_distance),
                    "nearest_object_id": r.cover.nearest_object_id,
                },
                "event": r.event.value,
            }
            for r in log.records
        ],
    }


def episode_log_from_dict(data: dict) -> EpisodeLog:
    spec = None
    if data.get("scenario_spec"):
        s = data["scenario_spec"]
        spec = ScenarioSpec(
            kind=ScenarioKind(s["kind"]),
            seed=s["seed"],
            extent_m=s["extent_m"],
            object_density=s["object_density"],
            cell_size=s["cell_size"],
        )
    records = []
    for r in data["records"]:
        st = r["state"]
        cov = r["cover"]
        records.append(
            StepRecord(
                tick=r["tick"],
                state=RobotState(**st),
                command=tuple(r["command"]),
                reward=RewardBreakdown(**r["reward"]),
                cover=CoverVerdict(
                    is_cover=cov["is_cover"],
                    cover_distance=math.inf
                    if cov["cover_distance"] is None
                    else cov["cover_distance"],
                    nearest_object_id=cov["nearest_object_id"],
                ),
                event=StepEvent(r["event"]),
            )
        )
    return EpisodeLog(
        scenario_id=data["scenario_id"],
        seed=data["seed"],
        records=tuple(records),
        terminal_event=StepEvent(data["terminal_event"]),
        duration_s=data["duration_s"],
        dt=data["dt"],
        scenario_spec=spec,
    )


def save_episode_log(log: EpisodeLog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(episode_log_to_dict(log)))


def load_episode_log(path: str | Path) -> EpisodeLog:
    return episode_log_from_dict(json.loads(Path(path).read_text()))


def write_trajectory_csv(log: EpisodeLog, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        for r in log.records:
            writer.writerow(
                [
                    r.tick,
                    repr(r.state.x),
                    repr(r.state.y),
                    repr(r.state.z),
                    repr(r.state.heading),
                    repr(r.state.v),
                    repr(r.state.omega),
                    repr(r.state.roll),
                    repr(r.state.pitch),
                    repr(r.reward.r_goal),
                    repr(r.reward.r_dir),
                    repr(r.reward.r_stab),
                    repr(r.reward.r_elev),
                    repr(r.reward.r_cover),
                    repr(r.reward.total),
                    int(r.cover.is_cover),
                    r.event.value,
                ]
            )


def write_curve_csv(returns: list[float], path: str | Path) -> None:
    """Learning curve as two columns: episode index, summed return."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("episode", "return"))
        for i, value in enumerate(returns):
            writer.writerow((i, repr(float(value))))


def read_curve_csv(path: str | Path) -> list[float]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return [float(r[1]) for r in rows[1:]]


def report_to_dict(report: Report) -> dict:
    return {
        "seed": report.seed,
        "cells": [
            {
                "policy": c.policy,
                "scenario": c.scenario,
                "episodes": c.episodes,
                "metrics": {
                    "success_rate": c.metrics.success_rate,
                    "mean_trajectory_length": c.metrics.mean_trajectory_length,
                    "mean_execution_time": c.metrics.mean_execution_time,
                    "mean_sim_time": c.metrics.mean_sim_time,
                    "in_cover_ratio": c.metrics.in_cover_ratio,
                    "mean_elevation_change": c.metrics.mean_elevation_change,
                },
            }
            for c in report.cells
        ],
    }


def report_from_dict(data: dict) -> Report:
    return Report(
        seed=data["seed"],
        cells=tuple(
            ReportCell(
                policy=c["policy"],
                scenario=c["scenario"],
                episodes=c["episodes"],
                metrics=Metrics(**c["metrics"]),
            )
            for c in data["cells"]
        ),
    )


def save_report(report: Report, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report)))


def load_report(path: str | Path) -> Report:
    return report_from_dict(json.loads(Path(path).read_text()))


def write_report_csv(report: Report, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            (
                "policy",
                "scenario",
                "episodes",
                "success_rate",
                "mean_trajectory_length",
                "mean_execution_time",
                "mean_sim_time",
                "in_cover_ratio",
                "mean_elevation_change",
            )
        )
        for c in report.cells:
            m = c.metrics
            writer.writerow(
                (
                    c.policy,
                    c.scenario,
                    c.episodes,
                    repr(m.success_rate),
                    repr(m.mean_trajectory_length),
                    repr(m.mean_execution_time),
                    repr(m.mean_sim_time),
                    repr(m.in_cover_ratio),
                    repr(m.mean_elevation_change),
                )
            )
