"""The five-term step reward and episode-end normalization.

Components: goal progress, heading consistency, attitude stability,
accumulated elevation change over a short position history, and proximity to
cover with a banded payoff (zero far away, linear inside the band, a large
constant penalty when dangerously close). The step reward is their sum,
optionally rescaled per component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateNormalizerError, EmptyHistoryError
from .world import wrap_angle

CRUSH_PENALTY = -1000.0  # cover closer than half the robot's shortest dimension


@dataclass(frozen=True)
class RewardWeights:
    """Tunable constants of the reward.

    w_elev defaults negative so accumulated elevation change is penalized;
    setting it positive flips the term into an elevation-seeking bonus.
    w_min is the robot's shortest external dimension and sets the scale of
    the cover proximity band.
    """

    w_elev: float = -1.0
    n_history: int = 5
    w_min: float = 0.67
    component_scales: tuple[float, float, float, float, float] = (1.0, 1.0, 1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        if self.n_history < 1:
            raise ValueError("n_history must be at least 1")
        if not self.w_min > 0:
            raise ValueError("w_min must be positive")
        if len(self.component_scales) != 5:
            raise ValueError("component_scales must have exactly five entries")


@dataclass(frozen=True)
class StepContext:
    """Everything one reward evaluation needs, gathered after a world step."""

    d_prev: float
    d_cur: float
    theta_prev: float
    theta_cur: float
    roll: float
    pitch: float
    elevation_history: tuple[float, ...]  # h_i of up to n previous positions
    h_cur: float
    d_cover: float  # inf when no qualifying cover object

    def __post_init__(self) -> None:
        if self.d_prev < 0 or self.d_cur < 0:
            raise ValueError("goal distances must be non-negative")


@dataclass(frozen=True)
class RewardBreakdown:
    r_goal: float
    r_dir: float
    r_stab: float
    r_elev: float
    r_cover: float
    total: float


def r_goal(d_prev: float, d_cur: float) -> float:
    """Progress toward the goal: previous distance minus current distance."""
    return d_prev - d_cur


def r_dir(theta_cur: float, theta_prev: float) -> float:
    """Heading-consistency penalty: minus the wrapped absolute heading change."""
    return -abs(wrap_angle(theta_cur - theta_prev))


def r_stab(roll: float, pitch: float) -> float:
    """Stability reward exp(-psi^2) with psi^2 taken as roll^2 + pitch^2."""
    return math.exp(-(roll * roll + pitch * pitch))


def r_elev(ctx: StepContext, weights: RewardWeights) -> float:
    """Weighted sum of absolute elevation changes against the recent history."""
    if not ctx.elevation_history:
        raise EmptyHistoryError("elevation history is empty")
    if len(ctx.elevation_history) > weights.n_history:
        raise ValueError("elevation history longer than n_history")
    return weights.w_elev * sum(abs(ctx.h_cur - h_i) for h_i in ctx.elevation_history)


def r_cover(d_cover: float, w_min: float) -> float:
    """Banded proximity-to-cover payoff.

    Zero beyond 1.5 * w_min (including the no-cover sentinel), the distance
    minus half w_min inside the band (both breakpoints inclusive), and a
    -1000 penalty closer than 0.5 * w_min.
    """
    if not w_min > 0:
        raise ValueError("w_min must be positive")
    if d_cover > 1.5 * w_min:
        return 0.0
    if d_cover >= 0.5 * w_min:
        return d_cover - 0.5 * w_min
    return CRUSH_PENALTY


def total_reward(ctx: StepContext, weights: RewardWeights = RewardWeights()) -> RewardBreakdown:
    """All five components plus their (per-component scaled) sum.

    The breakdown fields hold the raw components; with all scales at one the
    total is their plain sum.
    """
    goal = r_goal(ctx.d_prev, ctx.d_cur)
    direction = r_dir(ctx.theta_cur, ctx.theta_prev)
    stability = r_stab(ctx.roll, ctx.pitch)
    elevation = r_elev(ctx, weights)
    cover = r_cover(ctx.d_cover, weights.w_min)
    s = weights.component_scales
    total = (
        s[0] * goal + s[1] * direction + s[2] * stability + s[3] * elevation + s[4] * cover
    )
    return RewardBreakdown(
        r_goal=goal,
        r_dir=direction,
        r_stab=stability,
        r_elev=elevation,
        r_cover=cover,
        total=total,
    )


def normalize_episode(
    step_rewards: list[float] | tuple[float, ...],
    max_cover: float,
    min_visibility: float,
    enabled: bool = False,
    visibility_weight: float = 0.0,
) -> list[float]:
    """Episode-end reward normalization, off by default.

    When enabled, rewards are divided by max(1, max_cover) and the last step
    additionally receives -visibility_weight * min_visibility. Disabled, the
    rewards pass through unchanged.
    """
    rewards = list(step_rewards)
    if not enabled:
        return rewards
    denom = max(1.0, max_cover)
    if denom == 0.0 or not math.isfinite(denom):
        raise DegenerateNormalizerError(f"normalizer denominator {denom} is unusable")
    out = [r / denom for r in rewards]
    if out and visibility_weight != 0.0:
        out[-1] -= visibility_weight * min_visibility
    return out
