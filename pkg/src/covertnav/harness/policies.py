"""Velocity policies the episode runner can drive.

A policy turns the current environment state into a (v, omega) command.
The learned policy and the random baseline act in the raw [-1, 1]^2 space and
go through the feasibility projection; scripted baselines command velocities
directly.
"""

from __future__ import annotations

import math

import numpy as np

from ..ddpg import DdpgAgent, actor_act
from ..dwa import project_to_feasible, select_velocity_dwa
from ..errors import NoAdmissibleVelocityError
from ..navenv import NavEnv
from ..world import wrap_angle


class StandStillPolicy:
    """Never moves; useful for exercising the episode time limit."""

    def begin_episode(self, env: NavEnv) -> None:
        pass

    def command(self, env: NavEnv) -> tuple[float, float]:
        return 0.0, 0.0


class StraightToGoalPolicy:
    """Turn in place toward the goal, then drive at it full speed."""

    def __init__(self, heading_gate: float = 0.3):
        self.heading_gate = heading_gate

    def begin_episode(self, env: NavEnv) -> None:
        pass

    def command(self, env: NavEnv) -> tuple[float, float]:
        robot = env.world.robot
        goal = env.world.goal
        error = wrap_angle(math.atan2(goal[1] - robot.y, goal[0] - robot.x) - robot.heading)
        limits = env.config.limits
        omega = min(max(error / env.config.sim.dt, -limits.omega_max), limits.omega_max)
        v = limits.v_max if abs(error) < self.heading_gate else 0.0
        return v, omega


class DwaPolicy:
    """Classic dynamic-window selection; stops when nothing is admissible."""

    def begin_episode(self, env: NavEnv) -> None:
        pass

    def command(self, env: NavEnv) -> tuple[float, float]:
        cfg = env.config
        try:
            return select_velocity_dwa(
                env.world,
                env.world.robot,
                env.world.goal,
                cfg.limits,
                cfg.dwa,
                cfg.sim.dt,
                cfg.nv,
                cfg.nw,
                cfg.horizon,
                cfg.sim.robot_radius,
            )
        except NoAdmissibleVelocityError:
            return 0.0, 0.0


class RandomPolicy:
    """Uniform raw actions pushed through the feasibility projection."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def begin_episode(self, env: NavEnv) -> None:
        pass

    def command(self, env: NavEnv) -> tuple[float, float]:
        raw = self.rng.uniform(-1.0, 1.0, size=2)
        return project_to_feasible(raw, env.current_window)


class AgentPolicy:
    """A trained actor, optionally with exploration noise, behind the projection."""

    def __init__(self, agent: DdpgAgent, sigma: float = 0.0, rng: np.random.Generator | None = None):
        self.agent = agent
        self.sigma = sigma
        self.rng = rng

    def begin_episode(self, env: NavEnv) -> None:
        pass

    def command(self, env: NavEnv) -> tuple[float, float]:
        raw = actor_act(self.agent, env.observation(), self.sigma, self.rng)
        return project_to_feasible(raw, env.current_window)
