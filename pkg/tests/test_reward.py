import math

import numpy as np
import pytest

from covertnav.errors import DegenerateNormalizerError, EmptyHistoryError
from covertnav.reward import (
    RewardBreakdown,
    RewardWeights,
    StepContext,
    normalize_episode,
    r_cover,
    r_dir,
    r_elev,
    r_goal,
    r_stab,
    total_reward,
)


def ctx(**overrides):
    base = dict(
        d_prev=5.0,
        d_cur=4.2,
        theta_prev=0.3,
        theta_cur=0.5,
        roll=0.0,
        pitch=0.0,
        elevation_history=(0.0,),
        h_cur=0.0,
        d_cover=math.inf,
    )
    base.update(overrides)
    return StepContext(**base)


class TestGoalTerm:
    def test_progress(self):
        assert r_goal(5.0, 4.2) == pytest.approx(0.8)

    def test_no_progress(self):
        assert r_goal(3.0, 3.0) == 0.0

    def test_regression_penalized(self):
        assert r_goal(2.0, 2.6) == pytest.approx(-0.6)


class TestDirectionTerm:
    def test_direct(self):
        assert r_dir(0.5, 0.3) == pytest.approx(-0.2)

    def test_equal_headings(self):
        assert r_dir(1.1, 1.1) == 0.0

    def test_wraps_across_seam(self):
        # naive |3.1 - (-3.1)| = 6.2 would be wrong; the short way round is taken
        expected = -(2 * math.pi - 6.2)
        assert r_dir(3.1, -3.1) == pytest.approx(expected, abs=1e-12)
        assert r_dir(3.1, -3.1) == pytest.approx(-0.0832, abs=1e-4)

    def test_never_positive_and_zero_iff_equal(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            a, b = rng.uniform(-math.pi, math.pi, size=2)
            v = r_dir(a, b)
            assert v <= 0.0
            if a == b:
                assert v == 0.0
        assert r_dir(-math.pi + 1e-9, math.pi - 1e-9) == pytest.approx(0.0, abs=1e-8)


class TestStabilityTerm:
    def test_level_is_max(self):
        assert r_stab(0.0, 0.0) == 1.0

    def test_single_axis(self):
        assert r_stab(1.0, 0.0) == pytest.approx(math.exp(-1.0))

    def test_combined_axes(self):
        assert r_stab(0.6, 0.8) == pytest.approx(math.exp(-1.0))

    def test_bounded_and_peaked(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            roll, pitch = rng.uniform(-1.5, 1.5, size=2)
            v = r_stab(roll, pitch)
            assert 0.0 < v <= 1.0
            if (roll, pitch) != (0.0, 0.0):
                assert v < 1.0


class TestElevationTerm:
    def test_flat_history(self):
        weights = RewardWeights()
        assert r_elev(ctx(elevation_history=(1.0, 1.0, 1.0), h_cur=1.0), weights) == 0.0

    def test_direct_sum(self):
        weights = RewardWeights(w_elev=-1.0)
        value = r_elev(ctx(elevation_history=(0.0, 0.5), h_cur=1.0), weights)
        assert value == pytest.approx(-1.5)

    def test_linear_in_weight(self):
        history = (0.2, -0.3, 0.7)
        pos = r_elev(ctx(elevation_history=history, h_cur=0.4), RewardWeights(w_elev=2.0))
        neg = r_elev(ctx(elevation_history=history, h_cur=0.4), RewardWeights(w_elev=-2.0))
        assert pos == pytest.approx(-neg)

    def test_empty_history(self):
        with pytest.raises(EmptyHistoryError):
            r_elev(ctx(elevation_history=()), RewardWeights())


class TestCoverTerm:
    def test_above_band(self):
        assert r_cover(2.0, 0.67) == 0.0
        assert r_cover(math.inf, 0.67) == 0.0

    def test_middle_case(self):
        assert r_cover(0.67, 0.67) == pytest.approx(0.335)

    def test_crush_penalty(self):
        assert r_cover(0.2, 0.67) == -1000.0

    def test_breakpoints_inclusive(self):
        w = 0.5  # exactly representable: band [0.25, 0.75]
        assert r_cover(0.25, w) == 0.0  # lower edge belongs to the middle case
        assert r_cover(0.25 - 1e-12, w) == -1000.0
        assert r_cover(0.75, w) == pytest.approx(0.5)  # upper edge in the band
        assert r_cover(0.75 + 1e-12, w) == 0.0


def oracle_breakdown(c: StepContext, w: RewardWeights) -> RewardBreakdown:
    """Independent recomputation of every term, straight from the definitions."""
    goal = c.d_prev - c.d_cur
    diff = (c.theta_cur - c.theta_prev) % (2 * math.pi)
    if diff > math.pi:
        diff -= 2 * math.pi
    direction = -abs(diff)
    stab = math.exp(-(c.roll**2 + c.pitch**2))
    elev = sum(w.w_elev * abs(c.h_cur - h) for h in c.elevation_history)
    if c.d_cover > 1.5 * w.w_min:
        cover = 0.0
    elif c.d_cover >= 0.5 * w.w_min:
        cover = c.d_cover - 0.5 * w.w_min
    else:
        cover = -1000.0
    total = sum(s * v for s, v in zip(w.component_scales, (goal, direction, stab, elev, cover)))
    return RewardBreakdown(goal, direction, stab, elev, cover, total)


class TestTotalReward:
    def test_identity_composition(self):
        quiet = ctx(
            d_prev=3.0, d_cur=3.0, theta_prev=0.4, theta_cur=0.4,
            elevation_history=(0.0, 0.0), h_cur=0.0, d_cover=math.inf,
        )
        assert total_reward(quiet).total == pytest.approx(1.0)

    def test_component_fixture_sum(self):
        fixture = ctx(
            d_prev=5.0,
            d_cur=4.2,
            theta_prev=0.3,
            theta_cur=0.5,
            roll=1.0,
            pitch=0.0,
            elevation_history=(0.0, 0.5),
            h_cur=1.0,
            d_cover=0.67,
        )
        out = total_reward(fixture, RewardWeights(w_elev=-1.0, w_min=0.67))
        assert out.r_goal == pytest.approx(0.8)
        assert out.r_dir == pytest.approx(-0.2)
        assert out.r_stab == pytest.approx(0.367879, abs=1e-6)
        assert out.r_elev == pytest.approx(-1.5)
        assert out.r_cover == pytest.approx(0.335)
        assert out.total == pytest.approx(-0.197121, abs=1e-6)

    def test_scaling_doubles_total(self):
        weights = RewardWeights()
        doubled = RewardWeights(component_scales=(2.0, 2.0, 2.0, 2.0, 2.0))
        c = ctx(roll=0.2, pitch=-0.1, d_cover=0.9)
        assert total_reward(c, doubled).total == pytest.approx(2 * total_reward(c, weights).total)

    def test_total_is_sum_of_fields_at_unit_scales(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            c = ctx(
                d_prev=float(rng.uniform(0, 15)),
                d_cur=float(rng.uniform(0, 15)),
                theta_prev=float(rng.uniform(-math.pi, math.pi)),
                theta_cur=float(rng.uniform(-math.pi, math.pi)),
                roll=float(rng.uniform(-1, 1)),
                pitch=float(rng.uniform(-1, 1)),
                elevation_history=tuple(rng.uniform(-2, 2, size=int(rng.integers(1, 6)))),
                h_cur=float(rng.uniform(-2, 2)),
                d_cover=float(rng.choice([rng.uniform(0, 3), math.inf])),
            )
            out = total_reward(c)
            assert out.total == out.r_goal + out.r_dir + out.r_stab + out.r_elev + out.r_cover

    def test_matches_oracle_on_random_contexts(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            w = RewardWeights(
                w_elev=float(rng.uniform(-2, 2)),
                n_history=5,
                w_min=float(rng.uniform(0.3, 1.5)),
            )
            c = ctx(
                d_prev=float(rng.uniform(0, 15)),
                d_cur=float(rng.uniform(0, 15)),
                theta_prev=float(rng.uniform(-math.pi, math.pi)),
                theta_cur=float(rng.uniform(-math.pi, math.pi)),
                roll=float(rng.uniform(-1.2, 1.2)),
                pitch=float(rng.uniform(-1.2, 1.2)),
                elevation_history=tuple(rng.uniform(-3, 3, size=int(rng.integers(1, 6)))),
                h_cur=float(rng.uniform(-3, 3)),
                d_cover=float(rng.choice([rng.uniform(0, 4), math.inf])),
            )
            got = total_reward(c, w)
            want = oracle_breakdown(c, w)
            for f in ("r_goal", "r_dir", "r_stab", "r_elev", "r_cover", "total"):
                assert getattr(got, f) == pytest.approx(getattr(want, f), abs=1e-9), f


class TestNormalizeEpisode:
    def test_disabled_is_identity(self):
        rewards = [1.0, -2.0, 0.5]
        assert normalize_episode(rewards, max_cover=9.0, min_visibility=0.4) == rewards

    def test_all_zero(self):
        assert normalize_episode([0.0, 0.0], 2.0, 0.0, enabled=True) == [0.0, 0.0]

    def test_halves_with_denominator_two(self):
        out = normalize_episode([4.0, -1.0, 2.0], max_cover=2.0, min_visibility=0.0, enabled=True)
        assert out == [2.0, -0.5, 1.0]

    def test_small_max_cover_clamps_to_one(self):
        out = normalize_episode([4.0], max_cover=0.5, min_visibility=0.0, enabled=True)
        assert out == [4.0]

    def test_visibility_bonus_on_last_step(self):
        out = normalize_episode(
            [1.0, 1.0], max_cover=1.0, min_visibility=0.5, enabled=True, visibility_weight=2.0
        )
        assert out == [1.0, 0.0]

    def test_degenerate_denominator(self):
        with pytest.raises(DegenerateNormalizerError):
            normalize_episode([1.0], max_cover=math.inf, min_visibility=0.0, enabled=True)
