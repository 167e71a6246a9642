"""Jump operators, graininess, grids, circle algebra, literal parsing."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tempora.errors import AtMaximumError, NotRegressiveError, TimeNotInScaleError
from tempora.timescale import (
    QuadratureConfig,
    TimeScale,
    TimeScaleSyntaxError,
    circle_minus,
    circle_plus,
    delta_derivative,
    is_positively_regressive,
    parse_timescale,
)

Z100 = TimeScale.integers(0, 100)
MIXED = parse_timescale("[0,1];{2}")


def brute_sigma(points, t):
    """Enumeration oracle for sigma on a purely discrete scale."""
    later = [p for p in points if p > t + 1e-12]
    return min(later) if later else t


def brute_rho(points, t):
    earlier = [p for p in points if p < t - 1e-12]
    return max(earlier) if earlier else t


class TestJumpOperators:
    def test_sigma_integer_lattice(self):
        assert Z100.sigma(5) == 6

    def test_sigma_right_dense(self):
        assert MIXED.sigma(0.5) == 0.5

    def test_sigma_interval_end_jumps_to_point(self):
        # derived by enumerating segment boundaries
        assert MIXED.sigma(1.0) == 2.0

    def test_sigma_at_maximum_is_identity(self):
        assert Z100.sigma(100) == 100
        assert MIXED.sigma(2.0) == 2.0

    def test_rho_integer_lattice(self):
        assert Z100.rho(5) == 4

    def test_rho_point_back_to_interval(self):
        assert MIXED.rho(2.0) == 1.0

    def test_rho_at_minimum_is_identity(self):
        assert TimeScale.interval(0, 1).rho(0.0) == 0.0

    def test_sigma_rho_match_enumeration_oracle(self):
        pts = [0.0, 0.5, 1.25, 3.0, 3.5, 7.0]
        ts = TimeScale([(p, p) for p in pts])
        for t in pts:
            assert ts.sigma(t) == brute_sigma(pts, t)
            assert ts.rho(t) == brute_rho(pts, t)

    def test_membership_error(self):
        with pytest.raises(TimeNotInScaleError):
            Z100.sigma(5.5)
        with pytest.raises(TimeNotInScaleError):
            MIXED.rho(1.5)

    def test_membership_tolerance_absorbs_float_noise(self):
        assert Z100.sigma(5 + 1e-13) == 6


class TestGraininess:
    def test_lattice(self):
        assert Z100.graininess(5) == 1.0

    def test_interval_interior(self):
        assert MIXED.graininess(0.5) == 0.0

    def test_boundary_from_sigma(self):
        assert MIXED.graininess(1.0) == 1.0  # sigma(1) = 2

    def test_vectorized_agrees_pointwise(self):
        ts = parse_timescale("[0,1];{2};[3,4]")
        times = np.array([0.0, 0.25, 1.0, 2.0, 3.0, 3.9, 4.0])
        vec = ts.graininess_array(times)
        for t, mu in zip(times, vec):
            assert mu == ts.graininess(float(t))


class TestGrid:
    def test_isolated_points(self):
        ts = TimeScale([(0, 0), (1, 1), (2, 2)])
        assert ts.grid(1.0) == [(0.0, 1.0), (1.0, 1.0), (2.0, 0.0)]

    def test_interval_subdivision(self):
        ts = TimeScale.interval(0, 1)
        assert ts.grid(0.5) == [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)]

    def test_boundary_graininess_from_sigma(self):
        assert MIXED.grid(1.0) == [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]

    def test_strictly_increasing_and_step_bound(self):
        ts = parse_timescale("[0,1];{2};[3,5]")
        pts = ts.grid(0.3)
        times = [t for t, _ in pts]
        assert all(b > a for a, b in zip(times, times[1:]))
        for (t0, mu0), (t1, _) in zip(pts, pts[1:]):
            if mu0 == 0.0:
                assert t1 - t0 <= 0.3 + 1e-12

    def test_every_grid_mu_matches_scale(self):
        ts = parse_timescale("[0,1];{2};[3,5]")
        for t, mu in ts.grid(0.37):
            assert mu == ts.graininess(t)


class TestCircleAlgebra:
    def test_identity_element(self):
        assert circle_plus(0.0, 0.7, 2.0) == 0.7

    def test_hand_arithmetic(self):
        assert circle_plus(0.39, 0.37, 1.0) == pytest.approx(0.9043, abs=1e-15)

    def test_continuous_limit(self):
        assert circle_plus(0.2, 0.3, 0.0) == pytest.approx(0.5)

    def test_minus_self_is_zero(self):
        assert circle_minus(0.4, 0.4, 3.0) == 0.0

    def test_minus_hand_arithmetic(self):
        assert circle_minus(0.0, 0.39, 1.0) == pytest.approx(-0.2805755395683453, rel=1e-14)

    def test_minus_continuous_limit(self):
        assert circle_minus(0.9, 0.4, 0.0) == pytest.approx(0.5)

    def test_minus_singularity(self):
        with pytest.raises(NotRegressiveError):
            circle_minus(0.1, -1.0, 1.0)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 3))
    def test_plus_reduces_to_sum_when_mu_zero(self, p, q, mu):
        assert circle_plus(p, q, 0.0) == p + q

    @given(
        p=st.floats(-0.9, 5),
        q=st.floats(-0.9, 5),
        mu=st.floats(0.001, 1.0),
    )
    def test_group_inverse(self, p, q, mu):
        # (p (+) q) (-) q == p whenever q is regressive
        s = circle_plus(p, q, mu)
        assert circle_minus(s, q, mu) == pytest.approx(p, rel=1e-9, abs=1e-9)


class TestRegressivity:
    def test_constant_on_lattice(self):
        ts = TimeScale.integers(0, 10)
        assert is_positively_regressive(lambda t: -0.39, ts, 1.0)

    def test_boundary_case_fails(self):
        ts = TimeScale.integers(0, 10)
        assert not is_positively_regressive(lambda t: -1.0, ts, 1.0)

    def test_dense_always_positive(self):
        ts = TimeScale.interval(0, 1)
        assert is_positively_regressive(lambda t: -50.0, ts, 0.01)


class TestDeltaDerivative:
    def test_forward_difference_on_lattice(self):
        ts = TimeScale.integers(0, 10)
        assert delta_derivative(lambda t: t * t, 3, ts, 1e-5) == pytest.approx(7.0)

    def test_dense_matches_analytic(self):
        ts = TimeScale.interval(0, 1)
        val = delta_derivative(lambda t: t * t, 0.5, ts, 1e-5)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_constant_is_flat_everywhere(self):
        for ts in (Z100, MIXED, TimeScale.interval(0, 2)):
            for t in (0.0, 1.0):
                assert delta_derivative(lambda _: 4.2, t, ts, 1e-5) == 0.0

    def test_one_sided_at_interval_edges(self):
        ts = TimeScale.interval(0, 1)
        assert delta_derivative(lambda t: t * t, 0.0, ts, 1e-5) == pytest.approx(0.0, abs=1e-4)
        assert delta_derivative(lambda t: t * t, 1.0, ts, 1e-5) == pytest.approx(2.0, abs=1e-4)

    def test_left_scattered_maximum_rejected(self):
        with pytest.raises(AtMaximumError):
            delta_derivative(lambda t: t, 100, Z100, 1e-5)
        with pytest.raises(AtMaximumError):
            delta_derivative(lambda t: t, 2.0, MIXED, 1e-5)


class TestParser:
    def test_union_literal(self):
        ts = parse_timescale("[0,1];{2};[3,5]")
        assert ts.segments == ((0.0, 1.0), (2.0, 2.0), (3.0, 5.0))

    def test_unit_lattice(self):
        assert parse_timescale("Z[0,3]").segments == ((0, 0), (1, 1), (2, 2), (3, 3))

    def test_h_lattice(self):
        ts = parse_timescale("hZ[0,1,0.25]")
        assert len(ts.segments) == 5
        assert ts.graininess(0.25) == pytest.approx(0.25)

    def test_geometric_lattice(self):
        ts = parse_timescale("q^N[1,2,4]")
        assert ts.segments == ((1, 1), (2, 2), (4, 4), (8, 8))
        assert not ts.translation_invariant_hint

    def test_roundtrip_via_literal(self):
        lit = "[0,1];{2};[3,5]"
        assert parse_timescale(lit).to_literal() == lit

    def test_malformed_reports_position(self):
        with pytest.raises(TimeScaleSyntaxError) as err:
            parse_timescale("[0,1];oops;{3}")
        assert err.value.position == 6

    def test_overlap_rejected(self):
        with pytest.raises(TimeScaleSyntaxError):
            parse_timescale("[0,2];[1,3]")

    def test_negative_time_rejected(self):
        with pytest.raises(TimeScaleSyntaxError):
            parse_timescale("[-1,2]")

    def test_translation_hints(self):
        assert parse_timescale("Z[0,9]").translation_invariant_hint
        assert parse_timescale("hZ[0,1,0.1]").translation_invariant_hint
        assert parse_timescale("[0,7]").translation_invariant_hint
        assert not parse_timescale("[0,1];{2}").translation_invariant_hint


class TestTruncate:
    def test_truncate_inside_interval(self):
        ts = parse_timescale("[0,5];{6}")
        cut = ts.truncate(3.5)
        assert cut.segments == ((0.0, 3.5),)

    def test_truncate_keeps_points(self):
        ts = parse_timescale("Z[0,10]")
        assert ts.truncate(4).segments == ((0, 0), (1, 1), (2, 2), (3, 3), (4, 4))

    def test_sup_graininess(self):
        assert parse_timescale("[0,1];{2};[3,5]").sup_graininess() == 1.0
        assert TimeScale.interval(0, 9).sup_graininess() == 0.0
        assert parse_timescale("Z[0,5]").sup_graininess() == 1.0
