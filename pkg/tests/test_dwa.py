import math

import numpy as np
import pytest

from covertnav.dwa import (
    DwaWeights,
    DynamicLimits,
    VelocityWindow,
    admissible,
    build_observation,
    dwa_objective,
    dynamic_window,
    evaluate_window,
    observation_length,
    project_to_feasible,
    select_velocity_dwa,
)
from covertnav.errors import InadmissibleCandidateError, NoAdmissibleVelocityError
from covertnav.objects import CoverClass, CoverObject
from covertnav.perception import CoverVerdict
from covertnav.terrain import ElevationGrid
from covertnav.world import RobotState, SimParams, StepEvent, WorldState, step

LIMITS = DynamicLimits(v_max=1.0, v_min=0.0, omega_max=2.0, accel_v=1.0, accel_omega=4.0)


def flat_world(objects=(), robot=None, goal=(30.0, 20.0)):
    nodes = 81
    grid = ElevationGrid(nodes, nodes, 0.5, (0.0, 0.0), np.zeros(nodes * nodes))
    robot = robot or RobotState(20.0, 20.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    return WorldState(
        grid=grid, objects=tuple(objects), robot=robot, goal=goal, rng=np.random.default_rng(0)
    )


def rock(object_id, x, y, radius=0.5):
    return CoverObject(object_id, CoverClass.ROCK, (x, y, 0.0), radius, 2.0)


class TestDynamicWindow:
    def test_window_arithmetic(self):
        state = RobotState(0.5, 0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        window = dynamic_window(state, LIMITS, dt=0.1)
        assert window.v_bounds == (pytest.approx(0.4), pytest.approx(0.6))

    def test_rest_window_contains_zero(self):
        state = RobotState(0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        window = dynamic_window(state, LIMITS, dt=0.1)
        gaps = np.abs(window.candidates).sum(axis=1)
        assert gaps.min() < 1e-9

    def test_saturation_at_v_max(self):
        state = RobotState(0.5, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0)
        window = dynamic_window(state, LIMITS, dt=0.1)
        assert window.v_bounds[1] == LIMITS.v_max

    def test_candidates_within_bounds(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            state = RobotState(
                0.5, 0.5, 0.0, 0.0,
                float(rng.uniform(0, 1)), float(rng.uniform(-2, 2)), 0.0, 0.0,
            )
            w = dynamic_window(state, LIMITS, dt=0.1, nv=5, nw=9)
            assert np.all(w.candidates[:, 0] >= w.v_bounds[0])
            assert np.all(w.candidates[:, 0] <= w.v_bounds[1])
            assert np.all(w.candidates[:, 1] >= w.omega_bounds[0])
            assert np.all(w.candidates[:, 1] <= w.omega_bounds[1])


class TestAdmissible:
    def test_stationary_always_admissible(self):
        world = flat_world(objects=[rock(1, 21.0, 20.0)])
        assert admissible(world, world.robot, (0.0, 0.0), horizon=1.0, dt=0.1)

    def test_straight_into_wall(self):
        world = flat_world(objects=[rock(1, 20.5, 20.0, radius=0.3)])
        assert not admissible(world, world.robot, (1.0, 0.0), horizon=1.0, dt=0.1)

    def test_empty_world_all_admissible(self):
        world = flat_world()
        window = dynamic_window(world.robot, LIMITS, dt=0.1)
        for cand in window.candidates:
            assert admissible(world, world.robot, tuple(cand))

    def test_rollout_oracle(self):
        # any admissible candidate, replayed through the world stepper,
        # must produce zero collision events over the horizon
        world = flat_world(objects=[rock(1, 21.5, 20.3), rock(2, 22.0, 19.0, radius=1.0)])
        window = dynamic_window(
            RobotState(20.0, 20.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0), LIMITS, dt=0.1
        )
        for cand in window.candidates:
            flagged = admissible(world, world.robot, tuple(cand), horizon=1.0, dt=0.1)
            sim = world
            hit = False
            for _ in range(10):
                sim, event = step(sim, tuple(cand), 0.1)
                if event is StepEvent.COLLISION:
                    hit = True
                    break
            if flagged:
                assert not hit
            else:
                assert hit


class TestObjective:
    def test_heading_monotonicity(self):
        world = flat_world(goal=(30.0, 20.0))
        straight = dwa_objective(world, world.robot, (0.5, 0.0), world.goal, LIMITS)
        turning = dwa_objective(world, world.robot, (0.5, 1.0), world.goal, LIMITS)
        assert straight < turning

    def test_empty_world_clearance_term_vanishes(self):
        world = flat_world(goal=(30.0, 20.0))
        weights = DwaWeights(alpha=0.0, beta=5.0, gamma=0.0)
        assert dwa_objective(world, world.robot, (0.5, 0.0), world.goal, LIMITS, weights) == 0.0

    def test_positive_scaling_preserves_argmin(self):
        world = flat_world(objects=[rock(1, 23.0, 22.0)], goal=(30.0, 20.0))
        weights = DwaWeights(1.0, 0.5, 0.2)
        scaled = DwaWeights(3.0, 1.5, 0.6)
        cands = [(0.2, -0.4), (0.2, 0.0), (0.2, 0.4)]
        base = [dwa_objective(world, world.robot, c, world.goal, LIMITS, weights) for c in cands]
        tripled = [dwa_objective(world, world.robot, c, world.goal, LIMITS, scaled) for c in cands]
        assert int(np.argmin(base)) == int(np.argmin(tripled))
        for b, t in zip(base, tripled):
            assert t == pytest.approx(3.0 * b)

    def test_inadmissible_candidate_raises(self):
        world = flat_world(objects=[rock(1, 20.5, 20.0, radius=0.3)])
        with pytest.raises(InadmissibleCandidateError):
            dwa_objective(world, world.robot, (1.0, 0.0), world.goal, LIMITS)


def brute_force_select(world, state, goal, limits, weights, dt=0.1, nv=7, nw=7, horizon=1.0):
    """Independent argmin over the full candidate grid."""
    window = dynamic_window(state, limits, dt, nv, nw)
    best = None
    best_key = None
    for cand in window.candidates:
        cand = (float(cand[0]), float(cand[1]))
        if not admissible(world, state, cand, horizon, dt):
            continue
        cost = dwa_objective(world, state, cand, goal, limits, weights, horizon, dt)
        key = (cost, abs(cand[1]), cand[0])
        if best_key is None or key < best_key:
            best_key = key
            best = cand
    if best is None:
        raise NoAdmissibleVelocityError("none admissible")
    return best


class TestSelectVelocity:
    def test_empty_world_goal_ahead_drives_straight(self):
        world = flat_world(goal=(30.0, 20.0))
        v, omega = select_velocity_dwa(world, world.robot, world.goal, LIMITS)
        assert omega == 0.0
        assert (v, omega) == brute_force_select(world, world.robot, world.goal, LIMITS, DwaWeights())

    def test_all_candidates_blocked(self):
        ring = [rock(i, 20.0 + 1.2 * math.cos(a), 20.0 + 1.2 * math.sin(a), radius=0.6)
                for i, a in enumerate(np.linspace(0, 2 * math.pi, 12, endpoint=False))]
        world = flat_world(objects=ring)
        state = RobotState(20.0, 20.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0)  # moving, cannot stop in time
        with pytest.raises(NoAdmissibleVelocityError):
            select_velocity_dwa(world, state, world.goal, LIMITS)

    def test_symmetric_obstacles_tie_break_to_straight(self):
        world = flat_world(
            objects=[rock(1, 23.0, 22.0, radius=0.6), rock(2, 23.0, 18.0, radius=0.6)],
            goal=(30.0, 20.0),
        )
        v, omega = select_velocity_dwa(world, world.robot, world.goal, LIMITS)
        assert omega == 0.0
        assert (v, omega) == brute_force_select(world, world.robot, world.goal, LIMITS, DwaWeights())

    def test_matches_brute_force_on_random_worlds(self):
        rng = np.random.default_rng(7)
        for trial in range(25):
            objects = tuple(
                rock(i, float(rng.uniform(17, 25)), float(rng.uniform(17, 23)), float(rng.uniform(0.3, 0.8)))
                for i in range(int(rng.integers(0, 5)))
            )
            state = RobotState(
                20.0, 20.0, 0.0, float(rng.uniform(-math.pi, math.pi)),
                float(rng.uniform(0, 1)), float(rng.uniform(-1.5, 1.5)), 0.0, 0.0,
            )
            if any(
                math.hypot(o.position[0] - 20.0, o.position[1] - 20.0)
                < o.footprint_radius + 0.4
                for o in objects
            ):
                continue
            world = flat_world(objects=objects, goal=(float(rng.uniform(22, 32)), float(rng.uniform(15, 25))))
            try:
                got = select_velocity_dwa(world, state, world.goal, LIMITS)
            except NoAdmissibleVelocityError:
                with pytest.raises(NoAdmissibleVelocityError):
                    brute_force_select(world, state, world.goal, LIMITS, DwaWeights())
                continue
            want = brute_force_select(world, state, world.goal, LIMITS, DwaWeights())
            assert got == want, trial


class TestProjectToFeasible:
    def evaluated_window(self, world, state):
        window = dynamic_window(state, LIMITS, dt=0.1)
        return evaluate_window(world, state, window, world.goal, LIMITS)

    def test_center_action_maps_to_center(self):
        world = flat_world()
        state = RobotState(20.0, 20.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        window = self.evaluated_window(world, state)
        v, omega = project_to_feasible((0.0, 0.0), window)
        assert v == pytest.approx(0.5, abs=1e-9)
        assert omega == pytest.approx(0.0, abs=1e-9)

    def test_corner_action(self):
        world = flat_world()
        state = RobotState(20.0, 20.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        window = self.evaluated_window(world, state)
        v, omega = project_to_feasible((1.0, 1.0), window)
        assert v == window.v_bounds[1]
        assert omega == window.omega_bounds[1]

    def test_no_admissible_falls_back_to_stop(self):
        world = flat_world()
        state = RobotState(20.0, 20.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        window = self.evaluated_window(world, state)
        window.admissible[:] = False
        assert project_to_feasible((0.3, -0.7), window) == (0.0, 0.0)

    def test_output_is_window_member(self):
        rng = np.random.default_rng(8)
        world = flat_world(objects=[rock(1, 21.0, 20.5)])
        for _ in range(200):
            state = RobotState(
                20.0, 20.0, 0.0, float(rng.uniform(-math.pi, math.pi)),
                float(rng.uniform(0, 1)), float(rng.uniform(-1.5, 1.5)), 0.0, 0.0,
            )
            window = self.evaluated_window(world, state)
            out = project_to_feasible(tuple(rng.uniform(-1, 1, size=2)), window)
            if out == (0.0, 0.0) and not window.admissible.any():
                continue
            assert np.any(np.all(np.isclose(window.candidates, out, atol=0), axis=1))


class TestBuildObservation:
    def window(self, seed=0):
        world = flat_world()
        state = RobotState(20.0, 20.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        w = dynamic_window(state, LIMITS, dt=0.1)
        return evaluate_window(world, state, w, world.goal, LIMITS)

    def no_cover(self):
        return CoverVerdict(is_cover=False, cover_distance=math.inf, nearest_object_id=None)

    def test_padding_idempotent(self):
        w = self.window()
        state = RobotState(20.0, 20.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        short = build_observation([w], state, (30.0, 20.0), self.no_cover(), n_obs=4)
        full = build_observation([w, w, w, w], state, (30.0, 20.0), self.no_cover(), n_obs=4)
        assert np.array_equal(short.vector, full.vector)

    def test_fixed_length_across_worlds(self):
        state = RobotState(20.0, 20.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        empty = flat_world()
        crowded = flat_world(
            objects=[rock(i, 15.0 + 0.5 * i, 25.0, radius=0.2) for i in range(50)]
        )
        obs = []
        for world in (empty, crowded):
            w = dynamic_window(state, LIMITS, dt=0.1)
            evaluate_window(world, state, w, world.goal, LIMITS)
            obs.append(build_observation([w], state, world.goal, self.no_cover(), n_obs=4))
        assert len(obs[0].vector) == len(obs[1].vector) == observation_length(4, 7, 7)

    def test_all_inadmissible_encoding(self):
        w = self.window()
        w.admissible[:] = False
        w.costs[:] = np.inf
        state = RobotState(20.0, 20.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        obs = build_observation([w], state, (30.0, 20.0), self.no_cover(), n_obs=1)
        flags = obs.vector[:49]
        costs = obs.vector[49:98]
        assert np.all(flags == 0.0)
        assert np.all(costs == 1.0)

    def test_infinite_cover_distance_encodes_as_one(self):
        w = self.window()
        state = RobotState(20.0, 20.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0)
        obs = build_observation([w], state, (30.0, 20.0), self.no_cover(), n_obs=1)
        assert obs.vector[-2] == 1.0
