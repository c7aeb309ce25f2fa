"""Tests for the adaptive integrator and event localization."""

import numpy as np
import pytest

from regtrig.numerics.hybrid_ode import (
    _B,
    _P,
    EventAt,
    EventPreconditionError,
    IntegratorConfig,
    IntegratorConfigError,
    OdeProblem,
    ReachedTmax,
    Trajectory,
    integrate_until_event,
    step,
)

TIGHT = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, max_step=0.1, event_tol=1e-10)


def _decay(t: float, y: np.ndarray) -> np.ndarray:
    return -y


def test_dense_output_weights_match_step_weights():
    """At sigma = 1 the continuous extension reproduces the 5th-order update."""
    np.testing.assert_allclose(_P.sum(axis=1)[:6], _B, atol=1e-14)
    assert abs(_P.sum(axis=1)[6]) < 1e-14


def test_constant_rhs_is_exact():
    """y' = 1 is integrated exactly."""
    problem = OdeProblem(lambda t, y: np.ones(1), 0.0, np.zeros(1))
    outcome, _ = integrate_until_event(problem, TIGHT, None, 2.5)
    assert isinstance(outcome, ReachedTmax)
    assert outcome.t == 2.5
    np.testing.assert_allclose(outcome.y, [2.5], rtol=1e-13)


def test_exponential_decay_accuracy():
    """y' = -y reaches exp(-1) within the tolerance."""
    outcome, segments = integrate_until_event(OdeProblem(_decay, 0.0, [1.0]), TIGHT, None, 1.0)
    assert abs(outcome.y[0] - np.exp(-1.0)) < 1e-8
    traj = Trajectory(segments)
    for t in np.linspace(0.0, 1.0, 37):
        assert abs(traj(t)[0] - np.exp(-t)) < 1e-8


def test_fixed_step_convergence_order():
    """Halving the step size cuts the error by at least a factor of eight."""
    loose = IntegratorConfig(rel_tol=1.0, abs_tol=1.0, max_step=1.0, event_tol=1e-9)
    problem = OdeProblem(lambda t, y: y, 0.0, [1.0])

    def error(h: float) -> float:
        t, y = 0.0, problem.y0
        while t < 1.0 - 1e-12:
            result = step(problem, loose, t, y, h, t_limit=1.0)
            t, y = result.segment.t_end, result.y_next
        return abs(y[0] - np.e)

    assert error(0.1) / error(0.05) >= 8.0


def test_dense_segment_endpoints_are_exact():
    """Each segment evaluates to its stored endpoint states."""
    _, segments = integrate_until_event(OdeProblem(_decay, 0.0, [1.0, 2.0]), TIGHT, None, 1.0)
    for seg in segments:
        np.testing.assert_array_equal(seg.evaluate(seg.t_start), seg.y_start)
        np.testing.assert_array_equal(seg.evaluate(seg.t_end), seg.y_end)


def test_event_localized_on_up_crossing():
    """y' = 1 from 0 with guard y - 0.3 fires at t = 0.3."""
    problem = OdeProblem(lambda t, y: np.ones(1), 0.0, np.zeros(1))
    outcome, segments = integrate_until_event(problem, TIGHT, lambda t, y: y[0] - 0.3, 5.0)
    assert isinstance(outcome, EventAt)
    assert not outcome.immediate
    assert abs(outcome.t - 0.3) <= 2.0 * TIGHT.event_tol
    assert segments[-1].t_end == outcome.t
    assert outcome.y[0] >= 0.3 - 1e-12


def test_event_matches_brute_force_first_crossing():
    """y' = y from 1 with an oscillating guard: the event is its earliest root."""
    problem = OdeProblem(lambda t, y: y, 0.0, np.ones(1))

    def oscillating(t: float, y: np.ndarray) -> float:
        return float(np.sin(5.0 * y[0])) - 0.5

    outcome, _ = integrate_until_event(problem, TIGHT, oscillating, 1.0)
    assert isinstance(outcome, EventAt)

    grid = np.arange(0.0, 1.0, 1e-5)
    margins = np.sin(5.0 * np.exp(grid)) - 0.5
    first = grid[np.argmax(margins >= 0.0)]
    assert abs(outcome.t - first) <= 1e-5 + 2.0 * TIGHT.event_tol
    assert abs(outcome.t - np.log((2.0 * np.pi + np.pi / 6.0) / 5.0)) <= 1e-8


def test_event_returns_reached_tmax_without_crossing():
    """A guard that never crosses yields ReachedTmax at t_max."""
    problem = OdeProblem(_decay, 0.0, [1.0])
    outcome, _ = integrate_until_event(problem, TIGHT, lambda t, y: y[0] - 2.0, 3.0)
    assert isinstance(outcome, ReachedTmax)
    assert outcome.t == 3.0


def test_event_precondition():
    """A guard already non-negative at t0 raises unless an immediate event is allowed."""
    problem = OdeProblem(_decay, 0.0, [1.0])
    with pytest.raises(EventPreconditionError):
        integrate_until_event(problem, TIGHT, lambda t, y: 1.0, 1.0)
    outcome, _ = integrate_until_event(
        problem, TIGHT, lambda t, y: 1.0, 1.0, immediate_event=True
    )
    assert isinstance(outcome, EventAt)
    assert outcome.immediate
    assert outcome.t == pytest.approx(TIGHT.event_tol)


def test_empty_interval():
    """t_max at t0 returns immediately with no segments."""
    outcome, segments = integrate_until_event(OdeProblem(_decay, 1.0, [1.0]), TIGHT, None, 1.0)
    assert isinstance(outcome, ReachedTmax)
    assert segments == []


def test_lyapunov_identity_along_solution():
    """V = |y|^2 for y' = -y decays as exp(-2t) on the dense trajectory."""
    y0 = np.array([0.6, -0.8])
    _, segments = integrate_until_event(OdeProblem(_decay, 0.0, y0), TIGHT, None, 3.0)
    traj = Trajectory(segments)
    for t in np.linspace(0.0, 3.0, 61):
        y = traj(t)
        assert abs(float(y @ y) - np.exp(-2.0 * t)) < 1e-8


def test_integrator_config_validation():
    """Non-positive tolerances and event_tol above max_step are rejected."""
    with pytest.raises(IntegratorConfigError, match="rel_tol"):
        IntegratorConfig(rel_tol=0.0)
    with pytest.raises(IntegratorConfigError, match="event_tol"):
        IntegratorConfig(max_step=1e-3, event_tol=1e-2)


def test_trajectory_right_continuous_at_boundary():
    """At a shared boundary the later segment wins."""
    first = OdeProblem(lambda t, y: np.ones(1), 0.0, np.zeros(1))
    _, seg_a = integrate_until_event(first, TIGHT, None, 1.0)
    second = OdeProblem(lambda t, y: np.ones(1), 1.0, np.array([10.0]))
    _, seg_b = integrate_until_event(second, TIGHT, None, 2.0)
    traj = Trajectory(seg_a + seg_b)
    assert traj(1.0)[0] == pytest.approx(10.0)
    with pytest.raises(ValueError):
        traj(2.5)
