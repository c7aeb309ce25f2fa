"""Quick acceptance checks runnable from the command line."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np

from regtrig.control.closed_loop import CONVERGENCE_TOL, RunResult, run_nominal
from regtrig.core.presets import get_preset
from regtrig.harness.runner import run_scenario
from regtrig.numerics.hybrid_ode import IntegratorConfig
from regtrig.numerics.linalg import min_norm_update
from regtrig.systems.planar import example_planar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _dead_beat_after(result: RunResult, t_from: float, tol: float = CONVERGENCE_TOL) -> float:
    """Largest estimation error in force on [t_from, t_end]."""
    errors = [np.linalg.norm(result.theta_hat(t_from) - result.theta_true)]
    errors += [
        np.linalg.norm(ev.theta_hat - result.theta_true) for ev in result.events if ev.tau >= t_from
    ]
    return float(max(errors))


def check_projection() -> CheckResult:
    theta, rank, _ = min_norm_update(
        np.diag([1.0, 0.0]), np.array([2.0, 0.0]), np.array([5.0, 7.0])
    )
    ok = rank == 1 and np.allclose(theta, [2.0, 7.0], atol=1e-12)
    return CheckResult("projection", ok, f"theta={theta.tolist()}, rank={rank}")


def check_lyapunov_decay() -> CheckResult:
    entry = example_planar()
    theta = np.array([0.5, -0.3])
    cfg = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-14)
    result = run_nominal(entry.plant, entry.controller, theta, np.array([1.0, -0.5]), 5.0, cfg)
    V = entry.controller.V
    v0 = V(theta, result.state(0.0))
    worst = max(
        abs(V(theta, result.state(t)) - v0 * np.exp(-2.0 * t)) for t in np.linspace(0.0, 5.0, 101)
    )
    bound = 100.0 * cfg.rel_tol * v0
    detail = f"max deviation {worst:.3e} <= {bound:.3e}"
    return CheckResult("lyapunov_decay", worst <= bound, detail)


def check_fig4() -> CheckResult:
    result = run_scenario(replace(get_preset("fig4"), t_end=1.0))
    first = result.summary.first_event_time
    err = _dead_beat_after(result, 0.05)
    ok = first is not None and 0.01 <= first <= 0.04 and err <= CONVERGENCE_TOL
    return CheckResult("fig4_dead_beat", ok, f"first event {first}, error after 0.05: {err:.3e}")


def check_gram_consistency() -> CheckResult:
    result = run_scenario(replace(get_preset("fig4"), t_end=6.0))
    theta = result.theta_true
    worst = 0.0
    for ev in result.events[1:]:
        G, Z = ev.gram.G, ev.gram.Z
        scale = 1.0 + np.linalg.norm(G) * np.linalg.norm(theta)
        worst = max(worst, float(np.linalg.norm(Z - G @ theta) / scale))
    return CheckResult("gram_consistency", worst <= 1e-6, f"max scaled residual {worst:.3e}")


def check_lti() -> CheckResult:
    cfg = get_preset("lti_scalar")
    result = run_scenario(cfg)
    err = _dead_beat_after(result, cfg.T)
    return CheckResult("lti_dead_beat", err <= 1e-6, f"error after T: {err:.3e}")


def check_planar() -> CheckResult:
    cfg = get_preset("planar_s5")
    result = run_scenario(cfg)
    err = _dead_beat_after(result, 2.0 * cfg.T)
    return CheckResult("planar_dead_beat", err <= CONVERGENCE_TOL, f"error after 2T: {err:.3e}")


CHECKS: list[Callable[[], CheckResult]] = [
    check_projection,
    check_lyapunov_decay,
    check_fig4,
    check_gram_consistency,
    check_lti,
    check_planar,
]


def run_selftest() -> list[CheckResult]:
    results = []
    for check in CHECKS:
        try:
            outcome = check()
        except Exception as exc:  # a crash is a failed check
            outcome = CheckResult(check.__name__.removeprefix("check_"), False, repr(exc))
        level = logging.INFO if outcome.passed else logging.ERROR
        status = "ok" if outcome.passed else "FAILED"
        logger.log(level, "%s: %s (%s)", outcome.name, status, outcome.detail)
        results.append(outcome)
    return results
