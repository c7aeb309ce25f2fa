"""Tests for the plant catalog and the example systems."""

import numpy as np
import pytest

from regtrig.identification.identifier import GenericAccumulator, gram_from_snapshots
from regtrig.numerics.hybrid_ode import IntegratorConfig, OdeProblem, integrate_until_event
from regtrig.systems import (
    ExplicitScalarAccumulator,
    LtiAccumulator,
    affine_lti_spec,
    example_disturbed,
    example_lti,
    example_planar,
    get_system,
    list_systems,
    register_system,
    unregister_system,
)
from regtrig.systems.disturbed import (
    ExtendedMatchingController,
    disturbed_k,
    disturbed_V,
    disturbed_V_gradient,
    iss_bound,
)
from regtrig.systems.planar import coercivity_radius, planar_V, sandwich_constants

TIGHT = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)


def _integrate_with(entry, accumulators, theta_true, theta_hat, x0, t_end):
    """Closed loop with a frozen estimate, carrying several filter realizations side by side."""
    plant, ctrl = entry.plant, entry.controller
    n = plant.n
    sizes = [acc.size for acc in accumulators]

    def rhs(t, y):
        x = y[:n]
        u = np.atleast_1d(ctrl.k(theta_hat, x))
        parts = [plant.rhs(x, u, theta_true)]
        i = n
        for acc, size in zip(accumulators, sizes):
            parts.append(acc.derivative(x, u, y[i : i + size]))
            i += size
        return np.concatenate(parts)

    y0 = np.concatenate([x0] + [acc.initial() for acc in accumulators])
    outcome, _ = integrate_until_event(OdeProblem(rhs, 0.0, y0), TIGHT, None, t_end)
    y = outcome.y
    raws, i = [], n
    for size in sizes:
        raws.append(y[i : i + size])
        i += size
    return y[:n], raws


def test_disturbed_controller_values():
    """Spot values of the backstepping feedback."""
    assert disturbed_k(np.array([1.0]), np.array([0.0, 1.0]))[0] == pytest.approx(-2.0)
    assert disturbed_k(np.array([1.0]), np.array([1.0, 1.0]))[0] == pytest.approx(-159.0)
    assert disturbed_V(np.array([1.0]), np.array([1.0, 1.0])) == pytest.approx(8.5)


def test_extended_matching_rate():
    """theta_hat' = gamma x1^2 S with S = 25 at theta_hat = 1, x = (1, 1)."""
    comparator = ExtendedMatchingController(gamma=5.0)
    assert comparator.theta_rate(np.array([1.0]), np.array([1.0, 1.0]))[0] == pytest.approx(125.0)
    with pytest.raises(ValueError, match="gamma"):
        ExtendedMatchingController(gamma=0.0)


def test_disturbed_dissipation_inequality(rng):
    """With the exact parameter V' <= -V + (2 + v1^2) v1^2 / 4 + v2^2."""
    entry = example_disturbed()
    theta = np.array([1.0])
    for _ in range(500):
        x = rng.uniform(-2.0, 2.0, size=2)
        v1, v2 = rng.uniform(-2.0, 2.0, size=2)
        u = disturbed_k(theta, x)
        dx = entry.plant.rhs(x, u, theta) + np.array([v1 * x[0] ** 2 + v2, 0.0])
        v_dot = float(disturbed_V_gradient(theta, x) @ dx)
        bound = iss_bound(disturbed_V(theta, x), v1, v2)
        assert v_dot <= bound + 1e-9 * (1.0 + abs(bound))


def test_planar_lyapunov_identity(rng):
    """With the exact parameter V' = -2V for the planar plant."""
    entry = example_planar()
    for _ in range(200):
        theta = rng.uniform(-1.0, 1.0, size=2)
        x = rng.uniform(-2.0, 2.0, size=2)
        e = x[1] + x[0] + theta[0] * x[0] + theta[1] * x[0] ** 2
        grad = np.array([x[0] + e * (1.0 + theta[0] + 2.0 * theta[1] * x[0]), e])
        dx = entry.plant.rhs(x, entry.controller.k(theta, x), theta)
        V = planar_V(theta, x)
        assert float(grad @ dx) == pytest.approx(-2.0 * V, rel=1e-9, abs=1e-12)


def test_planar_sandwich_bounds(rng):
    """K1 |x|^2 <= V <= K2 |x|^2 on the stated ball."""
    rho, radius = 1.0, 2.0
    k1, k2 = sandwich_constants(rho, radius)
    for _ in range(500):
        theta = rng.uniform(-1.0, 1.0, size=2)
        theta *= min(1.0, rho / max(np.linalg.norm(theta), 1e-12))
        x = rng.uniform(-1.0, 1.0, size=2)
        x *= radius * rng.uniform() / max(np.linalg.norm(x), 1e-12)
        V = planar_V(theta, x)
        r2 = float(x @ x)
        assert k1 * r2 <= V + 1e-12
        assert V <= k2 * r2 + 1e-12


def test_planar_coercivity(rng):
    """Points of the sublevel set lie within the coercivity radius."""
    rho, level = 1.0, 0.5
    bound = coercivity_radius(level, rho)
    for _ in range(2000):
        theta = rng.uniform(-1.0, 1.0, size=2)
        theta *= min(1.0, rho / max(np.linalg.norm(theta), 1e-12))
        x = rng.uniform(-5.0, 5.0, size=2)
        if planar_V(theta, x) <= level:
            assert np.linalg.norm(x) <= bound


def test_explicit_block_matches_generic_filters():
    """The nine-state block reports twice the generic Gram system over [0, t]."""
    entry = example_disturbed()
    generic = GenericAccumulator(entry.plant)
    explicit = ExplicitScalarAccumulator(entry.plant)
    x0 = np.array([1.0, 1.0])
    x, (raw_g, raw_e) = _integrate_with(
        entry, [generic, explicit], np.array([1.0]), np.array([-4.0]), x0, 0.5
    )
    start = generic.snapshot(0.0, x0, generic.initial())
    gram = gram_from_snapshots(generic.snapshot(0.5, x, raw_g), start)
    end = explicit.snapshot(0.5, x, raw_e)
    block = explicit.gram(end, explicit.snapshot(0.0, x0, explicit.initial()))
    assert block.G[0, 0] == pytest.approx(2.0 * gram.G[0, 0], rel=1e-6)
    assert block.Z[0] == pytest.approx(2.0 * gram.Z[0], rel=1e-6)
    # noise-free: the estimate from the block is the true parameter
    assert block.Z[0] / block.G[0, 0] == pytest.approx(1.0, rel=1e-6)


def test_lti_regressor():
    """L*(x) stacks C_j x as columns."""
    spec = affine_lti_spec(
        A=[[0.0, 1.0], [0.0, 0.0]],
        B=[[0.0], [1.0]],
        C=[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
        K0=[[-1.0, -2.0]],
        K=[[[-1.0, 0.0]], [[0.0, -1.0]]],
    )
    np.testing.assert_allclose(spec.L_star(np.array([2.0, 3.0])), [[2.0, 0.0], [0.0, 3.0]])
    np.testing.assert_allclose(spec.K(np.array([1.0, 2.0])), [[-2.0, -4.0]])
    assert (spec.n, spec.m, spec.l) == (2, 1, 2)


def test_lti_reduced_filters_match_generic():
    """The reduced linear realization gives the same identifier state as the generic one."""
    entry = example_lti()
    generic = GenericAccumulator(entry.plant)
    reduced = entry.make_accumulator("double")
    assert isinstance(reduced, LtiAccumulator)
    assert reduced.size < generic.size
    x, (raw_g, raw_r) = _integrate_with(
        entry, [generic, reduced], np.array([2.0]), np.array([0.0]), np.array([1.0]), 0.7
    )
    a, b = generic.view(raw_g, x), reduced.view(raw_r, x)
    for name in ("z", "w", "B", "phi", "Q", "R"):
        np.testing.assert_allclose(getattr(a, name), getattr(b, name), rtol=1e-8, atol=1e-12)


def test_affine_lti_spec_validation():
    """M below one and mismatched gain slopes are rejected."""
    with pytest.raises(ValueError, match="M must be >= 1"):
        affine_lti_spec(A=[[0.0]], B=[[1.0]], C=[[[1.0]]], K0=[[-1.0]], K=[[[-1.0]]], M=0.5)
    with pytest.raises(ValueError, match="one gain slope per parameter"):
        affine_lti_spec(A=[[0.0]], B=[[1.0]], C=[[[1.0]]], K0=[[-1.0]], K=[])


def test_catalog_lookup():
    """Built-in systems are listed and unknown names raise."""
    assert {"planar_s5", "disturbed_s6", "lti_custom"} <= set(list_systems())
    assert get_system("planar_s5").N_h3 == 2
    assert get_system("disturbed_s6").plant.l == 1
    with pytest.raises(ValueError, match="Unknown system"):
        get_system("nope")
    spec = affine_lti_spec(A=[[0.0]], B=[[1.0]], C=[[[1.0]]], K0=[[-1.0]], K=[[[-1.0]]])
    with pytest.raises(ValueError, match="only applies"):
        get_system("planar_s5", spec)


def test_catalog_register_and_unregister():
    """Custom systems can be added and removed; built-ins are protected."""
    register_system("planar_copy", example_planar, "copy of the planar plant")
    try:
        assert "planar_copy" in list_systems()
        assert get_system("planar_copy").plant.n == 2
        with pytest.raises(ValueError, match="already exists"):
            register_system("planar_copy", example_planar)
    finally:
        unregister_system("planar_copy")
    assert "planar_copy" not in list_systems()
    with pytest.raises(ValueError, match="Cannot unregister built-in"):
        unregister_system("planar_s5")
    with pytest.raises(ValueError, match="not found"):
        unregister_system("planar_copy")
