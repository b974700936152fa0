import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favard import (
    DomainError,
    IntervalUnion,
    Slope,
    StepFunction,
    counting_function,
    farey_slopes,
    l2_norm_sq,
    projected_points,
    projection_interval_union,
    projection_measure,
    x_lambda_measure_estimate,
    x_lambda_member,
)
from conftest import random_digit_system


class TestSlope:
    def test_rational_reduction(self):
        s = Slope.rational(4, 2)
        assert (s.q, s.r) == (2, 1)

    def test_parse(self):
        assert (Slope.parse("2/1").q, Slope.parse("2/1").r) == (2, 1)
        assert (Slope.parse("0.5").q, Slope.parse("0.5").r) == (1, 2)
        assert Slope.parse("0").q == 0

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            Slope.rational(-1, 2)
        with pytest.raises(DomainError):
            Slope.real(-0.5)

    def test_trig(self):
        s = Slope.rational(2, 1)
        assert abs(s.cos_theta - 1 / 5**0.5) < 1e-15
        assert abs(s.sin_theta - 2 / 5**0.5) < 1e-15
        assert s.cos_sq == Fraction(1, 5)


class TestProjectedPoints:
    def test_t2_distinct(self, fc):
        pts = projected_points(fc, 1, Slope.rational(2, 1))
        assert pts.sorted_items() == [(0, 1), (3, 1), (6, 1), (9, 1)]
        assert pts.denominator == 4

    def test_t1_collision(self, fc):
        pts = projected_points(fc, 1, Slope.rational(1, 1))
        assert pts.sorted_items() == [(0, 1), (3, 2), (6, 1)]

    def test_level_zero(self, fc):
        pts = projected_points(fc, 0, Slope.rational(5, 3))
        assert pts.sorted_items() == [(0, 1)]

    def test_total_multiplicity(self, fc):
        for n in range(0, 5):
            pts = projected_points(fc, n, Slope.rational(1, 2))
            assert pts.total_multiplicity() == fc.K**n

    def test_requires_rational(self, fc):
        with pytest.raises(DomainError):
            projected_points(fc, 1, Slope.real(0.3))


class TestProjectionMeasure:
    def test_axis_projection(self, fc):
        pm = projection_measure(fc, 1, Slope.rational(0, 1))
        assert pm.rational_part == Fraction(1, 2)
        assert pm.cos_theta == 1.0
        assert pm.value == 0.5

    def test_tiling_direction(self, fc):
        pm = projection_measure(fc, 1, Slope.rational(2, 1))
        assert pm.rational_part == 3
        assert abs(pm.value - 3 / 5**0.5) < 1e-14

    def test_diagonal(self, fc):
        pm = projection_measure(fc, 1, Slope.rational(1, 1))
        assert pm.rational_part == Fraction(3, 2)
        assert abs(pm.value - 3 / (2 * 2**0.5)) < 1e-14

    def test_unit_square(self, fc):
        pm = projection_measure(fc, 0, Slope.rational(2, 1))
        assert pm.rational_part == 3
        s = Slope.rational(2, 1)
        assert abs(pm.value - (s.cos_theta + s.sin_theta)) < 1e-14

    def test_interval_union_explicit(self, fc):
        union = projection_interval_union(fc, 1, Slope.rational(1, 1))
        assert union.intervals == (
            (Fraction(0), Fraction(1, 2)),
            (Fraction(3, 4), Fraction(5, 4)),
            (Fraction(3, 2), Fraction(2)),
        )
        assert union.measure == Fraction(3, 2)

    def test_monotone_in_n(self, fc):
        for slope in (Slope.rational(0, 1), Slope.rational(1, 1), Slope.rational(1, 3)):
            prev = None
            for n in range(0, 6):
                part = projection_measure(fc, n, slope).rational_part
                if prev is not None:
                    assert part <= prev
                prev = part

    def test_tiling_stability(self, fc):
        for n in range(1, 7):
            assert projection_measure(fc, n, Slope.rational(2, 1)).rational_part == 3

    def test_swap_symmetry_exact(self):
        rng = random.Random(12)
        for _ in range(10):
            ds = random_digit_system(rng)
            q = rng.randint(1, 4)
            r = rng.randint(1, 4)
            n = rng.randint(0, 3)
            a = projection_measure(ds, n, Slope.rational(q, r))
            b = projection_measure(ds.swap(), n, Slope.rational(r, q))
            assert a.measure_sq == b.measure_sq

    def test_float_sweep_matches_exact(self, fc):
        for q, r in ((0, 1), (1, 1), (2, 1), (3, 5)):
            for n in range(0, 5):
                exact = projection_measure(fc, n, Slope.rational(q, r))
                floaty = projection_measure(fc, n, Slope.real(q / r))
                assert abs(exact.value - floaty.value) < 1e-9

    def test_inline_sweep_matches_interval_union(self):
        # projection_measure merges inline; the IntervalUnion path is an
        # independent implementation of the same sweep.
        rng = random.Random(15)
        for _ in range(15):
            ds = random_digit_system(rng)
            n = rng.randint(0, 3)
            slope = Slope.rational(rng.randint(0, 4), rng.randint(1, 4))
            pm = projection_measure(ds, n, slope)
            union = projection_interval_union(ds, n, slope)
            assert pm.rational_part == union.measure
            assert pm.union_components == len(union)

    def test_shadow_support_is_projection_union(self):
        # Where the shadow count is positive is exactly the projected set.
        rng = random.Random(16)
        for _ in range(10):
            ds = random_digit_system(rng)
            n = rng.randint(0, 3)
            slope = Slope.rational(rng.randint(0, 3), rng.randint(1, 3))
            step = counting_function(ds, n, slope, window="shadow")
            union = projection_interval_union(ds, n, slope)
            positive = Fraction(0)
            for v, lo, hi in zip(step.values, step.breakpoints, step.breakpoints[1:]):
                if v > 0:
                    positive += hi - lo
            assert positive == union.measure
            assert step.support_bounds() == (union.intervals[0][0], union.intervals[-1][1])


class TestCountingFunction:
    def test_axis_box_window(self, fc):
        step = counting_function(fc, 1, Slope.rational(0, 1), window="box")
        assert step.breakpoints == (
            Fraction(0),
            Fraction(1, 4),
            Fraction(3, 4),
            Fraction(1),
        )
        assert step.values == (2, 0, 2)
        assert step(Fraction(1, 8)) == 2
        assert step(Fraction(1, 2)) == 0

    def test_level_zero_box_is_indicator(self, fc):
        step = counting_function(fc, 0, Slope.rational(7, 2), window="box")
        assert step.breakpoints == (Fraction(0), Fraction(1))
        assert step.values == (1,)

    def test_box_integral_is_one(self):
        rng = random.Random(13)
        for _ in range(10):
            ds = random_digit_system(rng)
            n = rng.randint(0, 3)
            slope = Slope.rational(rng.randint(0, 3), rng.randint(1, 3))
            assert counting_function(ds, n, slope, window="box").integral() == 1

    def test_shadow_integral_is_window_mass(self, fc):
        slope = Slope.rational(2, 1)
        step = counting_function(fc, 2, slope, window="shadow")
        assert step.integral() == 1 + slope.t

    def test_shadow_counts_squares_on_tiling_direction(self, fc):
        # Translates tile [0, 3] exactly, so the count is 1 everywhere on it.
        step = counting_function(fc, 2, Slope.rational(2, 1), window="shadow")
        assert step.breakpoints == (Fraction(0), Fraction(3))
        assert step.values == (1,)

    def test_convolution_consistency(self, fc):
        # Level-m atoms are the level-(m-n) atoms rescaled plus level-n atoms.
        slope = Slope.rational(1, 2)
        m, n = 4, 2
        whole = projected_points(fc, m, slope).counts
        coarse = projected_points(fc, m - n, slope).counts
        fine = projected_points(fc, n, slope).counts
        shift = fc.K**n
        composed: dict[int, int] = {}
        for u, cu in coarse.items():
            for v, cv in fine.items():
                key = shift * u + v
                composed[key] = composed.get(key, 0) + cu * cv
        assert composed == whole
        # The same identity seen through the counting step function.
        direct = counting_function(fc, m, slope, window="box")
        rebuilt = StepFunction.from_atoms(
            composed, slope.r, slope.r * fc.K**m
        )
        assert rebuilt == direct


def _oracle_l2(ds, n, slope, window, samples=200_001):
    """Riemann-sum the explicit indicator sum, independently of StepFunction."""
    pts = projected_points(ds, n, slope)
    den = pts.denominator
    width = slope.r if window == "box" else slope.r + slope.q
    items = pts.sorted_items()
    lo = items[0][0]
    hi = items[-1][0] + width
    total = 0.0
    dx = (hi - lo) / samples
    for i in range(samples):
        x = lo + (i + 0.5) * dx
        value = sum(mult for p, mult in items if p <= x <= p + width)
        total += value * value * dx
    return total / den


class TestL2Norm:
    def test_axis_powers_of_two(self, fc):
        for n in range(0, 5):
            assert l2_norm_sq(fc, n, Slope.rational(0, 1), window="box") == 2**n

    def test_level_zero_is_one(self, fc):
        assert l2_norm_sq(fc, 0, Slope.rational(2, 1), window="box") == 1

    def test_tiling_direction_level_one(self, fc):
        # Four disjoint unit-height humps of width 1/4.
        value = l2_norm_sq(fc, 1, Slope.rational(2, 1), window="box")
        assert value == 1
        oracle = _oracle_l2(fc, 1, Slope.rational(2, 1), "box", samples=80_000)
        assert abs(float(value) - oracle) < 1e-3

    def test_diagonal_oracle(self, fc):
        value = l2_norm_sq(fc, 1, Slope.rational(1, 1), window="box")
        assert value == Fraction(3, 2)
        oracle = _oracle_l2(fc, 1, Slope.rational(1, 1), "box", samples=80_000)
        assert abs(float(value) - oracle) < 1e-3


class TestXLambda:
    def test_member_at_threshold(self, fc):
        res = x_lambda_member(fc, 3, Slope.rational(0, 1), 8.0)
        assert res.member and res.witness_n == 3 and res.max_value == 8

    def test_member_below_threshold(self, fc):
        assert not x_lambda_member(fc, 3, Slope.rational(0, 1), 7.9).member

    def test_level_one_bounded_by_base(self):
        rng = random.Random(14)
        for _ in range(10):
            ds = random_digit_system(rng)
            slope = Slope.rational(rng.randint(0, 4), rng.randint(1, 4))
            res = x_lambda_member(ds, 1, slope, float(ds.K))
            assert res.member, (ds, slope, res.max_value)

    def test_grid_trivial_thresholds(self, fc):
        grid = [Slope.rational(0, 1)]
        assert x_lambda_measure_estimate(fc, 2, 1e9, grid).member_fraction == 1
        assert x_lambda_measure_estimate(fc, 2, 0.0, grid).member_fraction == 0

    def test_farey_grid_baseline(self, fc):
        report = x_lambda_measure_estimate(fc, 4, 4.0, farey_slopes(16))
        assert len(report.entries) == 81
        assert report.member_fraction == Fraction(76, 81)


class TestIntervalUnion:
    @given(
        st.lists(
            st.tuples(st.integers(-50, 50), st.integers(1, 20)),
            min_size=0,
            max_size=20,
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_union_invariants(self, raw):
        intervals = [(Fraction(lo), Fraction(lo + w)) for lo, w in raw]
        union = IntervalUnion.from_intervals(intervals)
        for (a, b), (c, d) in zip(union.intervals, union.intervals[1:]):
            assert a < b and b < c  # disjoint, sorted, touching merged
        assert union.measure == sum((hi - lo for lo, hi in union.intervals), Fraction(0))
        # Containment: every input interval is covered.
        for lo, hi in intervals:
            assert any(a <= lo and hi <= b for a, b in union.intervals)

    def test_touching_merged(self):
        union = IntervalUnion.from_intervals([(0, 1), (1, 2)])
        assert union.intervals == ((0, 2),)

    def test_from_points(self):
        union = IntervalUnion.from_points([0, 3, 6, 9], 3)
        assert union.intervals == ((0, 12),)
        assert union.measure == 12


class TestStepFunction:
    def test_validation(self):
        with pytest.raises(ValueError):
            StepFunction((Fraction(0),), (1,))
        with pytest.raises(ValueError):
            StepFunction((Fraction(1), Fraction(0)), (1,))

    def test_l2_and_integral(self):
        step = StepFunction((Fraction(0), Fraction(1), Fraction(3)), (2, 1))
        assert step.integral() == 4
        assert step.l2_norm_sq() == 6
