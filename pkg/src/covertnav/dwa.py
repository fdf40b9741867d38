"""Dynamic-window velocity search and the learning-facing observation builder.

The window is the rectangle of (v, omega) pairs reachable within one control
interval under acceleration limits, clipped to absolute limits and discretized
on a small uniform grid. Candidates are admissible when their constant-velocity
rollout stays collision-free over the lookahead horizon; the classic selector
picks the admissible candidate with the lowest heading/clearance/velocity cost.
The observation builder flattens the last few evaluated windows, so a policy
acting on it inherits the window's feasibility guarantees via projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleCandidateError, NoAdmissibleVelocityError
from .perception import COVER_RANGE_M, CoverVerdict
from .world import (
    RobotState,
    SimParams,
    WorldState,
    advance_unicycle_arr,
    collision_mask,
    wrap_angle,
    wrap_angle_arr,
)

GOAL_DISTANCE_NORM_M = 12.0  # observation scale for the goal-distance feature


@dataclass(frozen=True)
class DynamicLimits:
    """Velocity and acceleration envelope of the platform."""

    v_max: float = 2.0
    v_min: float = 0.0
    omega_max: float = 2.0
    accel_v: float = 2.0
    accel_omega: float = 4.0

    def __post_init__(self) -> None:
        if self.v_max < self.v_min:
            raise ValueError("v_max must be at least v_min")
        if not (self.accel_v > 0 and self.accel_omega > 0):
            raise ValueError("accelerations must be positive")


@dataclass(frozen=True)
class DwaWeights:
    """Classic selector cost weights: heading error, inverse clearance, slowness."""

    alpha: float = 1.0
    beta: float = 0.5
    gamma: float = 0.2


@dataclass
class VelocityWindow:
    """Discretized one-interval velocity window.

    As built every candidate is flagged admissible with zero cost;
    evaluate_window refines both against a concrete world.
    """

    v_bounds: tuple[float, float]
    omega_bounds: tuple[float, float]
    vs: np.ndarray  # (nv,)
    omegas: np.ndarray  # (nw,)
    candidates: np.ndarray  # (nv * nw, 2), v-major
    admissible: np.ndarray  # (nv * nw,) bool
    costs: np.ndarray  # (nv * nw,) float, inf where inadmissible

    @property
    def nv(self) -> int:
        return len(self.vs)

    @property
    def nw(self) -> int:
        return len(self.omegas)


def dynamic_window(
    state: RobotState,
    limits: DynamicLimits,
    dt: float,
    nv: int = 7,
    nw: int = 7,
) -> VelocityWindow:
    """Uniform nv x nw grid over the velocities reachable within one interval."""
    if nv < 2 or nw < 2:
        raise ValueError("nv and nw must be at least 2")
    v_lo = max(limits.v_min, state.v - limits.accel_v * dt)
    v_hi = min(limits.v_max, state.v + limits.accel_v * dt)
    if v_lo > v_hi:  # state outside the envelope: collapse onto the nearest bound
        v_lo = v_hi = min(max(state.v, limits.v_min), limits.v_max)
    w_lo = max(-limits.omega_max, state.omega - limits.accel_omega * dt)
    w_hi = min(limits.omega_max, state.omega + limits.accel_omega * dt)
    if w_lo > w_hi:
        w_lo = w_hi = min(max(state.omega, -limits.omega_max), limits.omega_max)
    vs = np.clip(np.linspace(v_lo, v_hi, nv), v_lo, v_hi)
    omegas = np.clip(np.linspace(w_lo, w_hi, nw), w_lo, w_hi)
    cand_v, cand_w = np.meshgrid(vs, omegas, indexing="ij")
    candidates = np.stack([cand_v.reshape(-1), cand_w.reshape(-1)], axis=1)
    n = len(candidates)
    return VelocityWindow(
        v_bounds=(v_lo, v_hi),
        omega_bounds=(w_lo, w_hi),
        vs=vs,
        omegas=omegas,
        candidates=candidates,
        admissible=np.ones(n, dtype=bool),
        costs=np.zeros(n),
    )


def _rollout(
    world: WorldState,
    state: RobotState,
    vs: np.ndarray,
    omegas: np.ndarray,
    horizon: float,
    dt: float,
    robot_radius: float,
):
    """Constant-velocity rollouts; returns (collided, final x, y, heading, clearance)."""
    steps = max(1, int(round(horizon / dt)))
    xs = np.full(len(vs), state.x)
    ys = np.full(len(vs), state.y)
    hs = np.full(len(vs), state.heading)
    collided = np.zeros(len(vs), dtype=bool)
    clearance = np.full(len(vs), np.inf)
    from .world import _object_arrays  # shared cached arrays

    centers, radii, _, _ = _object_arrays(world.objects)
    for _ in range(steps):
        xs, ys, hs = advance_unicycle_arr(xs, ys, hs, vs, omegas, dt)
        collided |= collision_mask(world.grid, world.objects, xs, ys, robot_radius)
        if len(radii):
            d = np.hypot(xs[:, None] - centers[:, 0], ys[:, None] - centers[:, 1])
            surface = np.min(d - radii, axis=1) - robot_radius
            clearance = np.minimum(clearance, surface)
    return collided, xs, ys, hs, clearance


def admissible(
    world: WorldState,
    state: RobotState,
    cand: tuple[float, float],
    horizon: float = 1.0,
    dt: float = 0.1,
    robot_radius: float = SimParams().robot_radius,
) -> bool:
    """True iff the constant-velocity rollout stays collision-free for the horizon."""
    if horizon < dt:
        raise ValueError("horizon must cover at least one step")
    collided, *_ = _rollout(
        world, state, np.array([cand[0]]), np.array([cand[1]]), horizon, dt, robot_radius
    )
    return not bool(collided[0])


def _candidate_costs(
    goal: tuple[float, float],
    limits: DynamicLimits,
    weights: DwaWeights,
    vs: np.ndarray,
    fx: np.ndarray,
    fy: np.ndarray,
    fh: np.ndarray,
    clearance: np.ndarray,
) -> np.ndarray:
    bearing = np.arctan2(goal[1] - fy, goal[0] - fx)
    heading_error = np.abs(wrap_angle_arr(bearing - fh))
    with np.errstate(divide="ignore"):
        inv_clear = np.where(np.isinf(clearance), 0.0, 1.0 / clearance)
    return weights.alpha * heading_error + weights.beta * inv_clear + weights.gamma * (
        limits.v_max - vs
    )


def evaluate_window(
    world: WorldState,
    state: RobotState,
    window: VelocityWindow,
    goal: tuple[float, float],
    limits: DynamicLimits = DynamicLimits(),
    weights: DwaWeights = DwaWeights(),
    horizon: float = 1.0,
    dt: float = 0.1,
    robot_radius: float = SimParams().robot_radius,
) -> VelocityWindow:
    """Fill the window's admissibility flags and selector costs in place."""
    vs = window.candidates[:, 0]
    omegas = window.candidates[:, 1]
    collided, fx, fy, fh, clearance = _rollout(
        world, state, vs, omegas, horizon, dt, robot_radius
    )
    window.admissible = ~collided
    costs = _candidate_costs(goal, limits, weights, vs, fx, fy, fh, clearance)
    window.costs = np.where(window.admissible, costs, np.inf)
    return window


def dwa_objective(
    world: WorldState,
    state: RobotState,
    cand: tuple[float, float],
    goal: tuple[float, float],
    limits: DynamicLimits = DynamicLimits(),
    weights: DwaWeights = DwaWeights(),
    horizon: float = 1.0,
    dt: float = 0.1,
    robot_radius: float = SimParams().robot_radius,
) -> float:
    """Classic selector cost of one admissible candidate; lower is better."""
    vs = np.array([cand[0]])
    omegas = np.array([cand[1]])
    collided, fx, fy, fh, clearance = _rollout(
        world, state, vs, omegas, horizon, dt, robot_radius
    )
    if collided[0]:
        raise InadmissibleCandidateError(f"candidate {cand} collides within the horizon")
    return float(
        _candidate_costs(goal, limits, weights, vs, fx, fy, fh, clearance)[0]
    )


def select_velocity_dwa(
    world: WorldState,
    state: RobotState,
    goal: tuple[float, float],
    limits: DynamicLimits = DynamicLimits(),
    weights: DwaWeights = DwaWeights(),
    dt: float = 0.1,
    nv: int = 7,
    nw: int = 7,
    horizon: float = 1.0,
    robot_radius: float = SimParams().robot_radius,
) -> tuple[float, float]:
    """Lowest-cost admissible candidate; ties break to lower |omega|, then lower v."""
    window = dynamic_window(state, limits, dt, nv, nw)
    evaluate_window(world, state, window, goal, limits, weights, horizon, dt, robot_radius)
    idxs = np.flatnonzero(window.admissible)
    if len(idxs) == 0:
        raise NoAdmissibleVelocityError("every candidate collides within the horizon")
    best = min(
        idxs,
        key=lambda i: (
            window.costs[i],
            abs(window.candidates[i, 1]),
            window.candidates[i, 0],
        ),
    )
    return float(window.candidates[best, 0]), float(window.candidates[best, 1])


def project_to_feasible(
    raw_action: tuple[float, float] | np.ndarray,
    window: VelocityWindow,
) -> tuple[float, float]:
    """Map a [-1, 1]^2 action onto the window, snapping to the nearest admissible
    candidate in span-normalized velocity space; (0, 0) when none is admissible."""
    a = np.clip(np.asarray(raw_action, dtype=float), -1.0, 1.0)
    v_lo, v_hi = window.v_bounds
    w_lo, w_hi = window.omega_bounds
    v_t = v_lo + (a[0] + 1.0) / 2.0 * (v_hi - v_lo)
    w_t = w_lo + (a[1] + 1.0) / 2.0 * (w_hi - w_lo)
    idxs = np.flatnonzero(window.admissible)
    if len(idxs) == 0:
        return 0.0, 0.0
    v_span = max(v_hi - v_lo, 1e-12)
    w_span = max(w_hi - w_lo, 1e-12)
    dv = (window.candidates[idxs, 0] - v_t) / v_span
    dw = (window.candidates[idxs, 1] - w_t) / w_span
    best = idxs[int(np.argmin(dv * dv + dw * dw))]
    return float(window.candidates[best, 0]), float(window.candidates[best, 1])


@dataclass(frozen=True, eq=False)
class ObservationMatrix:
    """Fixed-length observation: per-window flags and scaled costs over the
    last n_obs instants, plus goal, attitude, and nearest-cover scalars."""

    vector: np.ndarray
    n_obs: int
    nv: int
    nw: int


def _encode_window(window: VelocityWindow) -> np.ndarray:
    flags = window.admissible.astype(float)
    costs = np.ones(len(window.costs))  # worst by default
    finite = window.admissible & np.isfinite(window.costs)
    if np.any(finite):
        c = window.costs[finite]
        lo, hi = float(c.min()), float(c.max())
        costs[finite] = (c - lo) / (hi - lo) if hi > lo else 0.0
    return np.concatenate([flags, costs])


def build_observation(
    window_history: list[VelocityWindow],
    state: RobotState,
    goal: tuple[float, float],
    cover: CoverVerdict,
    cover_bearing: float = 0.0,
    n_obs: int = 4,
) -> ObservationMatrix:
    """Flatten the last n_obs evaluated windows plus navigation scalars.

    Shorter histories are padded by repeating the oldest entry, so the vector
    length never depends on how far the episode has progressed.
    """
    if not window_history:
        raise ValueError("window_history must contain at least one window")
    history = list(window_history)[-n_obs:]
    while len(history) < n_obs:
        history.insert(0, history[0])
    blocks = [_encode_window(w) for w in history]

    goal_dist = math.hypot(goal[0] - state.x, goal[1] - state.y)
    goal_bearing = wrap_angle(math.atan2(goal[1] - state.y, goal[0] - state.x) - state.heading)
    cover_dist = min(cover.cover_distance, 2.0 * COVER_RANGE_M) / (2.0 * COVER_RANGE_M)
    scalars = np.array(
        [
            min(goal_dist / GOAL_DISTANCE_NORM_M, 2.0),
            goal_bearing / math.pi,
            state.roll / (math.pi / 2.0),
            state.pitch / (math.pi / 2.0),
            cover_dist,
            cover_bearing / math.pi,
        ]
    )
    vector = np.concatenate(blocks + [scalars])
    return ObservationMatrix(
        vector=vector, n_obs=n_obs, nv=history[0].nv, nw=history[0].nw
    )


def observation_length(n_obs: int, nv: int, nw: int) -> int:
    return n_obs * nv * nw * 2 + 6
