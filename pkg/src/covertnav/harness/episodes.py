"""Episode execution and the per-step trace it produces."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..navenv import NavEnv
from ..perception import CoverVerdict
from ..reward import RewardBreakdown
from ..terrain import ScenarioSpec
from ..world import RobotState, StepEvent

_ZERO_REWARD = RewardBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class StepRecord:
    tick: int
    state: RobotState
    command: tuple[float, float]
    reward: RewardBreakdown
    cover: CoverVerdict
    event: StepEvent


@dataclass(frozen=True)
class EpisodeLog:
    """Everything one episode produced: an initial snapshot at tick 0 followed
    by one record per executed step, plus the terminal event (NONE on a
    time-limit finish) and the wall-clock duration."""

    scenario_id: str
    seed: int
    records: tuple[StepRecord, ...]
    terminal_event: StepEvent
    duration_s: float
    dt: float
    scenario_spec: ScenarioSpec | None = None

    @property
    def steps(self) -> int:
        return len(self.records) - 1

    @property
    def sim_time_s(self) -> float:
        return self.steps * self.dt


def run_episode(
    policy,
    env: NavEnv,
    scenario_id: str = "",
    seed: int = 0,
    clock=time.perf_counter,
    scenario_spec: ScenarioSpec | None = None,
) -> EpisodeLog:
    """Reset the environment and drive the policy until a goal, a collision,
    or the step limit. The clock is injectable so deterministic runs can log
    deterministic durations."""
    start = clock()
    env.reset()
    policy.begin_episode(env)
    records = [
        StepRecord(
            tick=env.world.tick,
            state=env.world.robot,
            command=(0.0, 0.0),
            reward=_ZERO_REWARD,
            cover=env.verdict,
            event=StepEvent.NONE,
        )
    ]
    terminal = StepEvent.NONE
    for _ in range(env.config.max_steps):
        command = policy.command(env)
        _, breakdown, event = env.step_command(command)
        records.append(
            StepRecord(
                tick=env.world.tick,
                state=env.world.robot,
                command=command,
                reward=breakdown,
                cover=env.verdict,
                event=event,
            )
        )
        if event is not StepEvent.NONE:
            terminal = event
            break
    return EpisodeLog(
        scenario_id=scenario_id,
        seed=seed,
        records=tuple(records),
        terminal_event=terminal,
        duration_s=clock() - start,
        dt=env.config.sim.dt,
        scenario_spec=scenario_spec,
    )
