"""
Hybrid closed loop with event-triggered least-squares updates.

Between events the plant and the accumulator filters are integrated with the
estimate frozen. At each event a snapshot is taken, the identification window is
located, and the estimate for the next interval is computed from the Gram system.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

import numpy as np

from regtrig.control.trigger import Trigger, control, next_event_time
from regtrig.identification.identifier import (
    Accumulator,
    GenericAccumulator,
    GramSystem,
    MinNorm,
    Snapshot,
    UpdatePolicy,
    UpdateReport,
    WindowSpec,
    mu_index,
    update_estimate,
)
from regtrig.numerics.hybrid_ode import (
    EventAt,
    IntegratorConfig,
    OdeProblem,
    Trajectory,
    integrate_until_event,
)
from regtrig.systems.base import NominalController, PlantModel

logger = logging.getLogger(__name__)

ZERO_STATE_TOL = 1e-12
CONVERGENCE_TOL = 1e-5
MAX_EVENTS = 10**6

DisturbanceFn = Callable[[float, np.ndarray], np.ndarray]


class RunawayError(RuntimeError):
    """Raised when a run exceeds its event budget."""


class EventCause(str, Enum):
    INITIAL = "InitialEvent"
    GUARD = "GuardCrossed"
    DWELL = "DwellCapT"


@dataclass(frozen=True)
class EventRecord:
    """
    One event of the schedule.

    Attributes:
        index: Event number, 0 for the initial time.
        tau: Event time.
        x_at_tau: State at the event.
        theta_hat: Estimate in force from this event on.
        theta_before: Estimate in force just before the event.
        snapshot: Accumulator snapshot at tau.
        cause: Why the event fired.
        report: Update outcome, ``None`` for the initial event.
        gram: Gram system the update used.
        mu: Start of the identification window.
    """

    index: int
    tau: float
    x_at_tau: np.ndarray
    theta_hat: np.ndarray
    theta_before: np.ndarray
    snapshot: Snapshot | None
    cause: EventCause
    report: UpdateReport | None = None
    gram: GramSystem | None = None
    mu: float | None = None


@dataclass
class RunSummary:
    first_event_time: float | None
    event_count: int
    convergence_time: float | None
    sup_norm_x: float
    final_norm_x: float
    min_rank: int | None = None

    def to_dict(self) -> dict:
        """JSON-ready mapping; absent values are left out."""
        out = {
            "first_event_time": self.first_event_time,
            "event_count": self.event_count,
            "convergence_time": self.convergence_time,
            "sup_norm_x": self.sup_norm_x,
            "final_norm_x": self.final_norm_x,
            "min_rank": self.min_rank,
        }
        return {k: v for k, v in out.items() if v is not None}


RowFn = Callable[[float, np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray, float]]


@dataclass
class RunResult:
    """
    Dense record of one closed-loop run.

    ``trajectory`` holds the augmented state; the first ``n`` entries are x.
    ``row_fn(t, y, theta_hat)`` returns ``(u, theta_hat, V)`` at a point.
    """

    mode: str
    n: int
    m: int
    l: int
    theta_true: np.ndarray
    t_end: float
    trajectory: Trajectory
    events: list[EventRecord]
    row_fn: RowFn
    theta_from_state: bool = False
    summary: RunSummary = field(init=False)

    def __post_init__(self) -> None:
        self.summary = self._summarize()

    def state(self, t: float) -> np.ndarray:
        return self.trajectory(t)[: self.n]

    def theta_hat(self, t: float) -> np.ndarray:
        """Estimate in force at t (right-continuous at events)."""
        if self.theta_from_state:
            return self.trajectory(t)[self.n : self.n + self.l].copy()
        current = self.events[0].theta_hat
        for ev in self.events:
            if ev.tau > t:
                break
            current = ev.theta_hat
        return current.copy()

    def sample(self, times: np.ndarray) -> dict[str, np.ndarray]:
        """Evaluate x, u, theta_hat and V on a time grid."""
        times = np.asarray(times, dtype=float)
        xs = np.empty((times.size, self.n))
        us = np.empty((times.size, self.m))
        ths = np.empty((times.size, self.l))
        vs = np.empty(times.size)
        event_idx = 0
        for row, t in enumerate(times):
            y = self.trajectory(t)
            if self.theta_from_state:
                theta = y[self.n : self.n + self.l]
            else:
                while event_idx + 1 < len(self.events) and self.events[event_idx + 1].tau <= t:
                    event_idx += 1
                theta = self.events[event_idx].theta_hat
            u, th, v = self.row_fn(t, y, theta)
            xs[row], us[row], ths[row], vs[row] = y[: self.n], u, th, v
        return {"t": times, "x": xs, "u": us, "theta_hat": ths, "V": vs}

    def _summarize(self) -> RunSummary:
        nodes = [self.trajectory.t_start] + [seg.t_end for seg in self.trajectory.segments]
        norms = [float(np.linalg.norm(self.state(t))) for t in nodes]
        later = self.events[1:]

        convergence = None
        if self.theta_from_state:
            for t in nodes:
                if np.linalg.norm(self.theta_hat(t) - self.theta_true) <= CONVERGENCE_TOL:
                    convergence = t
                    break
        else:
            for ev in self.events:
                if np.linalg.norm(ev.theta_hat - self.theta_true) <= CONVERGENCE_TOL:
                    convergence = ev.tau
                    break

        ranks = [ev.report.rank for ev in later if ev.report is not None]
        return RunSummary(
            first_event_time=later[0].tau if later else None,
            event_count=len(later),
            convergence_time=convergence,
            sup_norm_x=max(norms),
            final_norm_x=norms[-1],
            min_rank=min(ranks) if ranks else None,
        )


def _closed_loop_rhs(
    plant: PlantModel,
    ctrl: NominalController,
    accumulator: Accumulator,
    theta_true: np.ndarray,
    theta_hat: np.ndarray,
    disturbance: DisturbanceFn | None,
) -> Callable[[float, np.ndarray], np.ndarray]:
    n = plant.n

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        x = y[:n]
        u = control(ctrl, theta_hat, x)
        dx = plant.rhs(x, u, theta_true)
        if disturbance is not None:
            dx = dx + disturbance(t, x)
        return np.concatenate([dx, accumulator.derivative(x, u, y[n:])])

    return rhs


def _bind_guard(
    trigger: Trigger, theta_hat: np.ndarray, x_at_tau: np.ndarray, n: int
) -> Callable[[float, np.ndarray], float]:
    def margin(t: float, y: np.ndarray) -> float:
        return trigger.margin(theta_hat, x_at_tau, y[:n])

    return margin


def _lyapunov_row(ctrl: NominalController, n: int) -> RowFn:
    def row(t: float, y: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        x = y[:n]
        return control(ctrl, theta, x), np.array(theta, copy=True), float(ctrl.V(theta, x))

    return row


def run_closed_loop(
    plant: PlantModel,
    ctrl: NominalController,
    trigger: Trigger,
    window: WindowSpec,
    policy: UpdatePolicy | None,
    theta_true: np.ndarray,
    theta_hat0: np.ndarray,
    x0: np.ndarray,
    t_end: float,
    integrator_cfg: IntegratorConfig,
    disturbance: DisturbanceFn | None = None,
    accumulator: Accumulator | None = None,
    max_events: int = MAX_EVENTS,
) -> RunResult:
    """
    Simulate the event-triggered adaptive closed loop on [0, t_end].

    Args:
        plant: Plant model.
        ctrl: Nominal controller used with the current estimate.
        trigger: Trigger margin and dwell cap.
        window: Identification window.
        policy: Update policy, MinNorm by default.
        theta_true: Parameter used to simulate the plant.
        theta_hat0: Initial estimate.
        x0: Initial state.
        t_end: Final time, > 0.
        integrator_cfg: Integrator tolerances.
        disturbance: Extra drift d(t, x) acting on the plant only.
        accumulator: Filter realization; the generic one when omitted.
        max_events: Event budget before :class:`RunawayError`.

    Returns:
        The RunResult with trajectory, events and summary.

    Raises:
        ValueError: If t_end is not positive or dimensions disagree.
        RunawayError: If the event budget is exceeded.
    """
    if not t_end > 0.0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    policy = policy or MinNorm()
    accumulator = accumulator or GenericAccumulator(plant)
    theta_true = np.asarray(theta_true, dtype=float).reshape(-1)
    theta_hat = np.asarray(theta_hat0, dtype=float).reshape(-1)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (plant.n,) or theta_true.shape != (plant.l,) or theta_hat.shape != (plant.l,):
        raise ValueError(
            f"dimension mismatch for plant '{plant.name}': x0 {x0.shape}, "
            f"theta_true {theta_true.shape}, theta_hat0 {theta_hat.shape}"
        )
    n = plant.n
    T = trigger.T

    y = np.concatenate([x0, accumulator.initial()])
    tau = 0.0
    events = [
        EventRecord(
            index=0,
            tau=0.0,
            x_at_tau=x0.copy(),
            theta_hat=theta_hat.copy(),
            theta_before=theta_hat.copy(),
            snapshot=accumulator.snapshot(0.0, x0, y[n:]),
            cause=EventCause.INITIAL,
        )
    ]
    trajectory = Trajectory()
    h0 = None

    while tau < t_end:
        if len(events) > max_events:
            raise RunawayError(f"more than {max_events} events before t={tau:.6g}")

        theta_frozen = theta_hat.copy()
        x_tau = y[:n].copy()
        rhs = _closed_loop_rhs(plant, ctrl, accumulator, theta_true, theta_frozen, disturbance)
        t_cap = tau + T

        guard_fn = None
        immediate = False
        if np.linalg.norm(x_tau) > ZERO_STATE_TOL:
            guard_fn = _bind_guard(trigger, theta_frozen, x_tau, n)
            immediate = guard_fn(tau, y) >= 0.0
            if immediate:
                logger.warning("trigger margin non-negative at tau=%.9g, firing immediately", tau)

        outcome, segments = integrate_until_event(
            OdeProblem(rhs, tau, y),
            integrator_cfg,
            guard_fn,
            min(t_cap, t_end),
            immediate_event=immediate,
            h0=h0,
        )
        trajectory.extend(segments)
        if segments:
            h0 = segments[-1].h
        y = np.array(outcome.y, dtype=float)

        if isinstance(outcome, EventAt):
            tau_next = next_event_time(tau, outcome.t, T)
            cause = EventCause.GUARD
        elif t_cap <= t_end:
            tau_next = t_cap
            cause = EventCause.DWELL
        else:
            break

        snapshot = accumulator.snapshot(tau_next, y[:n], y[n:])
        times = [ev.tau for ev in events] + [tau_next]
        mu, j = mu_index(times, len(events) - 1, window)
        gram = accumulator.gram(snapshot, events[j].snapshot)
        theta_new, report = update_estimate(theta_hat, gram, policy)
        record = EventRecord(
            index=len(events),
            tau=tau_next,
            x_at_tau=y[:n].copy(),
            theta_hat=theta_new,
            theta_before=theta_hat.copy(),
            snapshot=snapshot,
            cause=cause,
            report=report,
            gram=gram,
            mu=mu,
        )
        events.append(record)
        logger.debug(
            "event %d at tau=%.9g (%s): mu=%.6g rank=%d residual=%.3e skipped=%s",
            record.index,
            tau_next,
            cause.value,
            mu,
            report.rank,
            report.residual,
            report.skipped,
        )
        theta_hat = theta_new
        tau = tau_next

    return RunResult(
        mode="event_triggered",
        n=n,
        m=plant.m,
        l=plant.l,
        theta_true=theta_true,
        t_end=t_end,
        trajectory=trajectory,
        events=events,
        row_fn=_lyapunov_row(ctrl, n),
    )


def _smooth_run(
    mode: str,
    plant: PlantModel,
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    theta_true: np.ndarray,
    theta_hat0: np.ndarray,
    t_end: float,
    integrator_cfg: IntegratorConfig,
    row_fn: RowFn,
    theta_from_state: bool,
) -> RunResult:
    if not t_end > 0.0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    _, segments = integrate_until_event(OdeProblem(rhs, 0.0, y0), integrator_cfg, None, t_end)
    x0 = y0[: plant.n]
    initial = EventRecord(
        index=0,
        tau=0.0,
        x_at_tau=x0.copy(),
        theta_hat=theta_hat0.copy(),
        theta_before=theta_hat0.copy(),
        snapshot=None,
        cause=EventCause.INITIAL,
    )
    return RunResult(
        mode=mode,
        n=plant.n,
        m=plant.m,
        l=plant.l,
        theta_true=theta_true,
        t_end=t_end,
        trajectory=Trajectory(segments),
        events=[initial],
        row_fn=row_fn,
        theta_from_state=theta_from_state,
    )


def run_nominal(
    plant: PlantModel,
    ctrl: NominalController,
    theta_true: np.ndarray,
    x0: np.ndarray,
    t_end: float,
    integrator_cfg: IntegratorConfig,
    disturbance: DisturbanceFn | None = None,
) -> RunResult:
    """Known-parameter loop u = k(theta, x); no events are generated."""
    theta_true = np.asarray(theta_true, dtype=float).reshape(-1)
    x0 = np.asarray(x0, dtype=float).reshape(-1)

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        dx = plant.rhs(x, control(ctrl, theta_true, x), theta_true)
        return dx if disturbance is None else dx + disturbance(t, x)

    return _smooth_run(
        "nominal",
        plant,
        rhs,
        x0,
        theta_true,
        theta_true,
        t_end,
        integrator_cfg,
        _lyapunov_row(ctrl, plant.n),
        theta_from_state=False,
    )


class DynamicController(Protocol):
    """Continuous-time adaptive controller with its own parameter dynamics."""

    def theta_rate(self, theta_hat: np.ndarray, x: np.ndarray) -> np.ndarray: ...

    def control(self, theta_hat: np.ndarray, x: np.ndarray) -> np.ndarray: ...

    def V(self, theta_hat: np.ndarray, x: np.ndarray) -> float: ...


def run_extended_matching(
    plant: PlantModel,
    comparator: DynamicController,
    theta_true: np.ndarray,
    theta_hat0: np.ndarray,
    x0: np.ndarray,
    t_end: float,
    integrator_cfg: IntegratorConfig,
    disturbance: DisturbanceFn | None = None,
) -> RunResult:
    """Simulate a continuous adaptive controller as one smooth augmented ODE."""
    theta_true = np.asarray(theta_true, dtype=float).reshape(-1)
    theta_hat0 = np.asarray(theta_hat0, dtype=float).reshape(-1)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    n, l = plant.n, plant.l

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        x, th = y[:n], y[n : n + l]
        u = np.atleast_1d(comparator.control(th, x))
        dx = plant.rhs(x, u, theta_true)
        if disturbance is not None:
            dx = dx + disturbance(t, x)
        return np.concatenate([dx, np.atleast_1d(comparator.theta_rate(th, x))])

    def row(t: float, y: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        x = y[:n]
        u = np.atleast_1d(np.asarray(comparator.control(theta, x), dtype=float))
        return u, np.array(theta, copy=True), float(comparator.V(theta, x))

    return _smooth_run(
        "extended_matching",
        plant,
        rhs,
        np.concatenate([x0, theta_hat0]),
        theta_true,
        theta_hat0,
        t_end,
        integrator_cfg,
        row,
        theta_from_state=True,
    )
