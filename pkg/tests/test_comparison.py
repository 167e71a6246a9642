"""Comparison inequality check against the exact scattered recursion oracle."""

import numpy as np
import pytest

from tempora.analysis import exp_ominus_const, verify_comparison
from tempora.errors import NotRegressiveError
from tempora.timescale import QuadratureConfig, TimeScale, circle_negate, parse_timescale, ts_exp

Z200 = TimeScale.integers(0, 200)


def exact_recursion(a, b, y0, n):
    """Closed-form recursion for y^Delta = b - a*y^sigma on the unit lattice."""
    ys = [y0]
    for _ in range(n):
        ys.append((ys[-1] + b) / (1.0 + a))
    return np.array(ys)


class TestEnvelopeHelper:
    def test_matches_generalized_exponential(self):
        # dual route: step-factor cumulative product vs ts_exp of (-)a
        ts = parse_timescale("[0,1];{2};[3,4]")
        pts = ts.grid(0.25)
        times = np.array([t for t, _ in pts])
        mus = np.array([m for _, m in pts])
        a = 0.37
        env = exp_ominus_const(times, mus, a)
        neg = circle_negate(a, ts)
        for j in (1, 4, 5, 7, len(times) - 1):
            ref = ts_exp(neg, times[j], times[0], ts, QuadratureConfig(1e-4))
            assert env[j] == pytest.approx(ref, rel=1e-7)

    def test_lattice_closed_form(self):
        times = np.arange(11.0)
        mus = np.ones(11)
        mus[-1] = 0.0
        env = exp_ominus_const(times, mus, 0.25)
        assert np.allclose(env, (1.0 / 1.25) ** times, rtol=1e-14)


class TestExactRecursion:
    def test_fifty_random_systems_both_directions(self):
        rng = np.random.default_rng(42)
        times = np.arange(201.0)
        for _ in range(50):
            a = rng.uniform(0.05, 0.95)
            b = rng.uniform(0.1, 10.0)
            y0 = rng.uniform(0.01, 10.0)
            y = exact_recursion(a, b, y0, 200)
            for direction in ("upper", "lower"):
                rep = verify_comparison(Z200, times, y, a, b, direction)
                assert rep.premise_holds, (a, b, y0, direction)
                assert rep.max_violation <= 1e-10, (a, b, y0, direction)

    def test_equilibrium_trajectory(self):
        a, b = 0.4, 2.0
        y = np.full(201, b / a)
        rep = verify_comparison(Z200, np.arange(201.0), y, a, b, "upper")
        assert rep.premise_holds
        assert rep.max_violation <= 1e-12

    def test_bracket_collapses_at_equilibrium_start(self):
        # y(t0) = b/a makes the bound the constant b/a
        a, b = 0.3, 1.2
        y = exact_recursion(a, b, b / a, 200)
        assert np.allclose(y, b / a, rtol=1e-12)
        rep = verify_comparison(Z200, np.arange(201.0), y, a, b, "upper")
        assert rep.max_violation <= 1e-12

    def test_decaying_premise_trajectory_respects_bound(self):
        # y' = (y + mu*b')/(1 + mu*a) with b' < b still satisfies y^Delta <= b - a y^sigma
        a, b = 0.5, 4.0
        y = exact_recursion(a, 0.5 * b, 3.0, 200)
        rep = verify_comparison(Z200, np.arange(201.0), y, a, b, "upper")
        assert rep.premise_holds
        assert rep.max_violation <= 1e-10


class TestPerturbedTrajectories:
    def test_premise_violation_stops_assertion(self):
        a, b, y0 = 0.3, 1.0, 0.5
        y = exact_recursion(a, b, y0, 200)
        y[50] *= 3.0  # jolt upward: breaks the differential inequality at i=49
        rep = verify_comparison(Z200, np.arange(201.0), y, a, b, "upper")
        assert not rep.premise_holds
        assert rep.first_premise_violation_time == 49.0
        assert rep.checked_points == 50
        # the prefix before the jolt still satisfies the bound
        assert rep.max_violation <= 1e-10

    def test_violating_trajectory_not_asserted_as_pass(self):
        # trajectory that grows faster than the comparison system
        a, b = 0.5, 1.0
        times = np.arange(201.0)
        y = 1.0 + 0.1 * times
        rep = verify_comparison(Z200, times, y, a, b, "upper")
        assert not rep.premise_holds

    def test_lower_direction_violation_detected(self):
        a, b, y0 = 0.3, 1.0, 8.0
        y = exact_recursion(a, b, y0, 200)
        y[80] *= 0.2  # dip downward: breaks the >= inequality
        rep = verify_comparison(Z200, np.arange(201.0), y, a, b, "lower")
        assert not rep.premise_holds
        assert rep.first_premise_violation_time == 79.0


class TestPreconditions:
    def test_not_regressive(self):
        with pytest.raises(NotRegressiveError):
            verify_comparison(Z200, np.arange(201.0), np.ones(201), 1.0, 1.0, "upper")

    def test_positive_rates_required(self):
        with pytest.raises(ValueError):
            verify_comparison(Z200, np.arange(201.0), np.ones(201), -0.1, 1.0)

    def test_positive_trajectory_required(self):
        y = np.ones(201)
        y[3] = 0.0
        with pytest.raises(ValueError):
            verify_comparison(Z200, np.arange(201.0), y, 0.3, 1.0)

    def test_direction_validated(self):
        with pytest.raises(ValueError):
            verify_comparison(Z200, np.arange(201.0), np.ones(201), 0.3, 1.0, "sideways")
