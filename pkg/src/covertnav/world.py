"""World state, differential-drive kinematics, collision geometry, visibility.

WorldState is a value: stepping returns a successor instead of mutating, so
episodes with independent rng streams can run side by side. The robot's legal
domain is the grid interior inset by one cell, which keeps the gradient
stencil valid everywhere the robot can stand.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import InvalidZoneError, NoValidGoalError
from .objects import CoverObject
from .terrain import ElevationGrid, elevation_at, gradient_at

TAU = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = (angle + math.pi) % TAU - math.pi
    if w == -math.pi:
        w = math.pi
    return w


def wrap_angle_arr(angles: np.ndarray) -> np.ndarray:
    w = (np.asarray(angles, dtype=float) + math.pi) % TAU - math.pi
    return np.where(w == -math.pi, math.pi, w)


def advance_unicycle(
    x: float, y: float, heading: float, v: float, omega: float, dt: float
) -> tuple[float, float, float]:
    """One explicit-Euler unicycle update; the heading turns before translating."""
    heading = wrap_angle(heading + omega * dt)
    return x + v * math.cos(heading) * dt, y + v * math.sin(heading) * dt, heading


def advance_unicycle_arr(xs, ys, headings, vs, omegas, dt):
    """Vectorized advance_unicycle over candidate arrays."""
    headings = wrap_angle_arr(headings + omegas * dt)
    return xs + vs * np.cos(headings) * dt, ys + vs * np.sin(headings) * dt, headings


class StepEvent(enum.Enum):
    NONE = "none"
    COLLISION = "collision"
    GOAL_REACHED = "goal_reached"


@dataclass(frozen=True)
class SimParams:
    """Geometry and timing shared by stepping, spawning, and planning."""

    dt: float = 0.1
    robot_radius: float = 0.4
    goal_tolerance: float = 0.5

    def __post_init__(self) -> None:
        if not (self.dt > 0 and self.robot_radius > 0 and self.goal_tolerance > 0):
            raise ValueError("dt, robot_radius, goal_tolerance must be positive")


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    z: float
    heading: float  # radians in (-pi, pi]
    v: float
    omega: float
    roll: float
    pitch: float

    def __post_init__(self) -> None:
        if not -math.pi < self.heading <= math.pi:
            raise ValueError(f"heading {self.heading} not normalized to (-pi, pi]")


@dataclass(frozen=True, eq=False)
class WorldState:
    grid: ElevationGrid
    objects: tuple[CoverObject, ...]
    robot: RobotState
    goal: tuple[float, float]
    tick: int = 0
    rng: np.random.Generator = field(default_factory=np.random.default_rng)


def interior_bounds(grid: ElevationGrid) -> tuple[float, float, float, float]:
    """(x_min, y_min, x_max, y_max) of the robot's legal domain (one-cell inset)."""
    c = grid.cell_size
    return (grid.origin[0] + c, grid.origin[1] + c, grid.x_max - c, grid.y_max - c)


def in_interior(grid: ElevationGrid, x: float, y: float) -> bool:
    x0, y0, x1, y1 = interior_bounds(grid)
    return x0 <= x <= x1 and y0 <= y <= y1


@lru_cache(maxsize=16)
def _object_arrays(objects: tuple[CoverObject, ...]):
    if not objects:
        return (
            np.zeros((0, 2)),
            np.zeros(0),
            np.zeros(0),
            np.zeros(0),
        )
    centers = np.array([[o.position[0], o.position[1]] for o in objects])
    radii = np.array([o.footprint_radius for o in objects])
    base_z = np.array([o.position[2] for o in objects])
    heights = np.array([o.obj_height for o in objects])
    return centers, radii, base_z, heights


def collision_mask(
    grid: ElevationGrid,
    objects: tuple[CoverObject, ...],
    xs: np.ndarray,
    ys: np.ndarray,
    robot_radius: float,
) -> np.ndarray:
    """Per-point collision flags: strictly inside an inflated footprint, or out of bounds."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    x0, y0, x1, y1 = interior_bounds(grid)
    mask = (xs < x0) | (xs > x1) | (ys < y0) | (ys > y1)
    centers, radii, _, _ = _object_arrays(objects)
    if len(radii):
        d = np.hypot(xs[..., None] - centers[:, 0], ys[..., None] - centers[:, 1])
        mask = mask | np.any(d < radii + robot_radius, axis=-1)
    return mask


def collision_check(
    world: WorldState, pos: tuple[float, float], robot_radius: float
) -> bool:
    """True iff pos is strictly within robot_radius of an object footprint or out of bounds."""
    return bool(collision_mask(world.grid, world.objects, pos[0], pos[1], robot_radius))


def roll_pitch_at(
    grid: ElevationGrid, x: float, y: float, heading: float
) -> tuple[float, float]:
    """Attitude implied by terrain slope: pitch along the heading, roll across it."""
    dz_dx, dz_dy = gradient_at(grid, x, y)
    c, s = math.cos(heading), math.sin(heading)
    pitch = math.atan(dz_dx * c + dz_dy * s)
    roll = math.atan(-dz_dx * s + dz_dy * c)
    return roll, pitch


def spawn_robot(
    world: WorldState,
    start_zone: tuple[float, float, float, float],
    params: SimParams = SimParams(),
) -> RobotState:
    """Uniform random rest pose inside an axis-aligned start zone.

    The zone must lie in the robot's legal domain and clear every object
    footprint by at least the robot radius; a zero-area zone pins the pose.
    """
    x0, y0, x1, y1 = start_zone
    if x0 > x1 or y0 > y1:
        raise InvalidZoneError("start zone has negative extent")
    if not (in_interior(world.grid, x0, y0) and in_interior(world.grid, x1, y1)):
        raise InvalidZoneError("start zone leaves the robot's legal domain")
    for obj in world.objects:
        ox, oy = obj.position[0], obj.position[1]
        dx = max(x0 - ox, 0.0, ox - x1)
        dy = max(y0 - oy, 0.0, oy - y1)
        if math.hypot(dx, dy) < obj.footprint_radius + params.robot_radius:
            raise InvalidZoneError(f"object {obj.object_id} intersects the start zone")
    rng = world.rng
    x = float(rng.uniform(x0, x1))
    y = float(rng.uniform(y0, y1))
    heading = wrap_angle(float(rng.uniform(-math.pi, math.pi)))
    roll, pitch = roll_pitch_at(world.grid, x, y, heading)
    return RobotState(
        x=x,
        y=y,
        z=elevation_at(world.grid, x, y),
        heading=heading,
        v=0.0,
        omega=0.0,
        roll=roll,
        pitch=pitch,
    )


def sample_goal(
    world: WorldState,
    max_radius: float = 12.0,
    max_tries: int = 10_000,
) -> tuple[float, float]:
    """Uniform goal in the disk of max_radius around the robot, in bounds and
    outside every object footprint. Raises NoValidGoalError after max_tries."""
    rng = world.rng
    rx, ry = world.robot.x, world.robot.y
    centers, radii, _, _ = _object_arrays(world.objects)
    for _ in range(max_tries):
        r = max_radius * math.sqrt(float(rng.uniform(0.0, 1.0)))
        ang = float(rng.uniform(-math.pi, math.pi))
        gx = rx + r * math.cos(ang)
        gy = ry + r * math.sin(ang)
        if not in_interior(world.grid, gx, gy):
            continue
        if len(radii) and np.any(np.hypot(gx - centers[:, 0], gy - centers[:, 1]) <= radii):
            continue
        return gx, gy
    raise NoValidGoalError(f"no free goal within {max_radius} m after {max_tries} tries")


def step(
    world: WorldState,
    cmd: tuple[float, float],
    dt: float,
    params: SimParams = SimParams(),
) -> tuple[WorldState, StepEvent]:
    """Advance one control interval under a constant (v, omega) command.

    Leaving the legal domain is reported as a collision (the pose is clamped
    back inside so terrain-derived fields stay defined). A collision takes
    precedence over goal arrival.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    v, omega = cmd
    x, y, heading = advance_unicycle(
        world.robot.x, world.robot.y, world.robot.heading, v, omega, dt
    )
    event = StepEvent.NONE
    x0, y0, x1, y1 = interior_bounds(world.grid)
    if not (x0 <= x <= x1 and y0 <= y <= y1):
        event = StepEvent.COLLISION
        x = min(max(x, x0), x1)
        y = min(max(y, y0), y1)
    elif collision_check(world, (x, y), params.robot_radius):
        event = StepEvent.COLLISION
    if event is StepEvent.NONE:
        if math.hypot(x - world.goal[0], y - world.goal[1]) <= params.goal_tolerance:
            event = StepEvent.GOAL_REACHED
    roll, pitch = roll_pitch_at(world.grid, x, y, heading)
    robot = RobotState(
        x=x,
        y=y,
        z=elevation_at(world.grid, x, y),
        heading=heading,
        v=v,
        omega=omega,
        roll=roll,
        pitch=pitch,
    )
    return replace(world, robot=robot, tick=world.tick + 1), event


def line_of_sight(
    world: WorldState,
    a: tuple[float, float, float],
    b: tuple[float, float, float],
    ignore_object_id: int | None = None,
) -> bool:
    """True iff segment a-b clears the terrain and every object cylinder.

    The segment is sampled at cell-size intervals. ignore_object_id exempts
    one cylinder, letting perception ray-cast at an object without the target
    occluding itself.
    """
    if a == b:
        return True
    ax, ay, az = a
    bx, by, bz = b
    length = math.dist(a, b)
    n = max(2, int(math.ceil(length / world.grid.cell_size)) + 1)
    t = np.linspace(0.0, 1.0, n)
    xs = ax + t * (bx - ax)
    ys = ay + t * (by - ay)
    zs = az + t * (bz - az)
    terrain = elevation_at(world.grid, xs, ys)
    if np.any(zs < terrain - 1e-9):
        return False
    centers, radii, base_z, heights = _object_arrays(world.objects)
    if len(radii) == 0:
        return True
    keep = np.ones(len(radii), dtype=bool)
    if ignore_object_id is not None:
        keep = np.array([o.object_id != ignore_object_id for o in world.objects])
    if not np.any(keep):
        return True
    d2 = np.hypot(xs[:, None] - centers[keep, 0], ys[:, None] - centers[keep, 1])
    inside = (d2 < radii[keep]) & (zs[:, None] < base_z[keep] + heights[keep])
    return not bool(np.any(inside))


def make_world(
    grid: ElevationGrid,
    objects: tuple[CoverObject, ...],
    seed: int,
    params: SimParams = SimParams(),
    start_zone: tuple[float, float, float, float] | None = None,
    goal_radius: float = 12.0,
) -> WorldState:
    """Assemble a ready-to-run world: seeded rng, spawned robot, sampled goal."""
    from .terrain import default_start_zone

    if start_zone is None:
        extent = min(grid.x_max - grid.origin[0], grid.y_max - grid.origin[1])
        start_zone = default_start_zone(extent)
    rng = np.random.default_rng(seed)
    cx = (start_zone[0] + start_zone[2]) / 2.0
    cy = (start_zone[1] + start_zone[3]) / 2.0
    provisional = RobotState(
        x=cx,
        y=cy,
        z=elevation_at(grid, cx, cy),
        heading=0.0,
        v=0.0,
        omega=0.0,
        roll=0.0,
        pitch=0.0,
    )
    world = WorldState(grid=grid, objects=tuple(objects), robot=provisional, goal=(cx, cy), rng=rng)
    robot = spawn_robot(world, start_zone, params)
    world = replace(world, robot=robot)
    goal = sample_goal(world, goal_radius)
    return replace(world, goal=goal)
