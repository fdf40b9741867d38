"""Episode environment tying terrain, world stepping, perception, reward, and
the dynamic-window observation together behind a small reset/step interface."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .dwa import (
    DwaWeights,
    DynamicLimits,
    ObservationMatrix,
    VelocityWindow,
    build_observation,
    dynamic_window,
    evaluate_window,
    observation_length,
    project_to_feasible,
)
from .objects import CoverObject
from .perception import CoverVerdict, detect_cover, sense
from .reward import RewardBreakdown, RewardWeights, StepContext, total_reward
from .terrain import ElevationGrid
from .world import (
    SimParams,
    StepEvent,
    WorldState,
    make_world,
    step as world_step,
    wrap_angle,
)


@dataclass(frozen=True)
class EnvConfig:
    """Everything an episode needs beyond the terrain itself."""

    sim: SimParams = SimParams()
    limits: DynamicLimits = DynamicLimits()
    dwa: DwaWeights = DwaWeights()
    reward: RewardWeights = RewardWeights()
    max_steps: int = 100
    goal_radius: float = 12.0
    nv: int = 7
    nw: int = 7
    n_obs: int = 4
    horizon: float = 1.0
    fov: float = math.pi
    max_range: float = 20.0

    @property
    def observation_dim(self) -> int:
        return observation_length(self.n_obs, self.nv, self.nw)


# Component scales used when training: goal progress is amplified and the
# constant-baseline stability term damped so the per-step return differences
# between steering choices stand out against the survival baseline; the cover
# term is emphasized enough that lingering beside reachable cover beats
# passing it. Evaluation and logging default to the plain unit-scale sum.
TRAINING_REWARD_SCALES = (10.0, 1.0, 0.1, 1.0, 3.0)


def training_env_config(**overrides) -> EnvConfig:
    """EnvConfig with the reward balance used for training runs."""
    reward = overrides.pop("reward", RewardWeights(component_scales=TRAINING_REWARD_SCALES))
    return EnvConfig(reward=reward, **overrides)


class NavEnv:
    """One scenario instance that can be reset into fresh episodes.

    reset() respawns the robot in the start zone and samples a new goal from
    the env's own rng stream, so an env seeded once produces a deterministic
    sequence of episodes.
    """

    def __init__(
        self,
        grid: ElevationGrid,
        objects: tuple[CoverObject, ...],
        rng: np.random.Generator | int,
        config: EnvConfig = EnvConfig(),
        start_zone: tuple[float, float, float, float] | None = None,
        goal_fn=None,
    ):
        self.grid = grid
        self.objects = tuple(objects)
        self.rng = np.random.default_rng(rng)
        self.config = config
        self.start_zone = start_zone
        self.goal_fn = goal_fn  # optional override: WorldState -> (x, y)
        self._by_id = {o.object_id: o for o in self.objects}
        self.world: WorldState | None = None
        self.verdict: CoverVerdict | None = None
        self.current_window: VelocityWindow | None = None
        self._windows: deque[VelocityWindow] = deque(maxlen=config.n_obs)
        self._elevations: deque[float] = deque(maxlen=config.reward.n_history)
        self.steps_taken = 0

    @property
    def observation_dim(self) -> int:
        return self.config.observation_dim

    def _sense_and_judge(self) -> CoverVerdict:
        detections = sense(self.world, self.config.fov, self.config.max_range)
        # Detections are robot-framed, so the robot sits at the frame origin.
        return detect_cover(detections, (0.0, 0.0, 0.0))

    def _cover_bearing(self) -> float:
        if self.verdict is None or self.verdict.nearest_object_id is None:
            return 0.0
        obj = self._by_id.get(self.verdict.nearest_object_id)
        if obj is None:
            return 0.0
        robot = self.world.robot
        return wrap_angle(
            math.atan2(obj.position[1] - robot.y, obj.position[0] - robot.x) - robot.heading
        )

    def _refresh_window(self) -> None:
        cfg = self.config
        window = dynamic_window(self.world.robot, cfg.limits, cfg.sim.dt, cfg.nv, cfg.nw)
        evaluate_window(
            self.world,
            self.world.robot,
            window,
            self.world.goal,
            cfg.limits,
            cfg.dwa,
            cfg.horizon,
            cfg.sim.dt,
            cfg.sim.robot_radius,
        )
        self.current_window = window
        self._windows.append(window)

    def observation(self) -> np.ndarray:
        matrix: ObservationMatrix = build_observation(
            list(self._windows),
            self.world.robot,
            self.world.goal,
            self.verdict,
            self._cover_bearing(),
            self.config.n_obs,
        )
        return matrix.vector

    def reset(self) -> np.ndarray:
        self.world = make_world(
            self.grid,
            self.objects,
            self.rng,
            params=self.config.sim,
            start_zone=self.start_zone,
            goal_radius=self.config.goal_radius,
        )
        if self.goal_fn is not None:
            self.world = replace(self.world, goal=tuple(self.goal_fn(self.world)))
        self.verdict = self._sense_and_judge()
        self._windows.clear()
        self._refresh_window()
        self._elevations.clear()
        self._elevations.append(self.world.robot.z)
        self.steps_taken = 0
        return self.observation()

    def goal_distance(self) -> float:
        r = self.world.robot
        return math.hypot(self.world.goal[0] - r.x, self.world.goal[1] - r.y)

    def step_command(
        self, command: tuple[float, float]
    ) -> tuple[np.ndarray, RewardBreakdown, StepEvent]:
        """Advance one interval under an explicit (v, omega) command."""
        d_prev = self.goal_distance()
        theta_prev = self.world.robot.heading
        self.world, event = world_step(self.world, command, self.config.sim.dt, self.config.sim)
        robot = self.world.robot
        self.verdict = self._sense_and_judge()
        ctx = StepContext(
            d_prev=d_prev,
            d_cur=self.goal_distance(),
            theta_prev=theta_prev,
            theta_cur=robot.heading,
            roll=robot.roll,
            pitch=robot.pitch,
            elevation_history=tuple(self._elevations),
            h_cur=robot.z,
            d_cover=self.verdict.cover_distance,
        )
        breakdown = total_reward(ctx, self.config.reward)
        self._elevations.append(robot.z)
        self._refresh_window()
        self.steps_taken += 1
        return self.observation(), breakdown, event

    def step(
        self, raw_action
    ) -> tuple[np.ndarray, RewardBreakdown, StepEvent, tuple[float, float]]:
        """Project a raw [-1, 1]^2 action onto the feasible window, then step."""
        window = self.current_window
        command = project_to_feasible(raw_action, window)
        if command != (0.0, 0.0):
            assert np.any(
                np.all(np.isclose(window.candidates, command, atol=1e-12), axis=1)
            ), "projected command left the window"
        obs, breakdown, event = self.step_command(command)
        return obs, breakdown, event, command
