"""Adaptive Dormand-Prince 5(4) integration with dense output and guard localization.

Integration always restarts at an event, so every :class:`DenseSegment` covers a
stretch where the right-hand side is smooth. The guard is sampled on the dense
interpolant at four evenly spaced points of each accepted step and the first sample
with a non-negative margin is refined by bisection. A margin that rises above zero
and falls back between two samples is not detected; ``max_step`` bounds that gap.
"""

import bisect
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

logger = logging.getLogger(__name__)

GuardFn = Callable[[float, np.ndarray], float]

# Dormand-Prince tableau with the free 4th-order continuous extension.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [
            0.0,
            127303824393 / 49829197408,
            -318862633887 / 49829197408,
            701980252875 / 199316789632,
        ],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ERROR_EXPONENT = -1.0 / 5.0
_UNDERFLOW = 1e-14
_GUARD_SAMPLES = (0.25, 0.5, 0.75, 1.0)


class IntegrationError(RuntimeError):
    """Raised when the integrator cannot make progress."""


class StepSizeUnderflowError(IntegrationError):
    """Raised when the accepted step size would fall below 1e-14 * max(1, |t|)."""


class EventPreconditionError(ValueError):
    """Raised when the guard is already non-negative at the start of an interval."""


class IntegratorConfigError(ValueError):
    """Raised for invalid integrator settings."""


@dataclass(frozen=True)
class IntegratorConfig:
    """
    Tolerances of the adaptive integrator.

    Attributes:
        rel_tol: Relative local error tolerance.
        abs_tol: Absolute local error tolerance.
        max_step: Largest step the controller may take.
        event_tol: Width of the bracketing interval left by event bisection.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = 0.1
    event_tol: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "max_step", "event_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0.0):
                raise IntegratorConfigError(f"{name} must be strictly positive, got {value}")
        if self.event_tol > self.max_step:
            raise IntegratorConfigError("event_tol must not exceed max_step")


@dataclass
class OdeProblem:
    """Initial value problem y' = rhs(t, y), y(t0) = y0."""

    rhs: Callable[[float, np.ndarray], np.ndarray]
    t0: float
    y0: np.ndarray

    def __post_init__(self) -> None:
        self.y0 = np.asarray(self.y0, dtype=float).reshape(-1)

    @property
    def dimension(self) -> int:
        return self.y0.shape[0]


@dataclass
class DenseSegment:
    """
    Continuous extension over one accepted step.

    ``y(t_start + sigma * h) = y_start + h * coeffs @ [sigma, sigma^2, sigma^3, sigma^4]``
    for ``sigma`` in [0, 1]. A segment truncated at an event keeps ``h`` and the
    coefficients of the full step but reports the shorter ``t_end``.
    """

    t_start: float
    t_end: float
    h: float
    y_start: np.ndarray
    y_end: np.ndarray
    coeffs: np.ndarray

    def _sigma(self, t: float) -> float:
        return (t - self.t_start) / self.h

    def evaluate(self, t: float) -> np.ndarray:
        if t == self.t_end:
            return self.y_end.copy()
        if t == self.t_start:
            return self.y_start.copy()
        s = self._sigma(t)
        powers = np.array([s, s * s, s**3, s**4])
        return self.y_start + self.h * (self.coeffs @ powers)

    def truncate(self, t_new_end: float) -> "DenseSegment":
        """Return a copy ending at ``t_new_end`` whose endpoint is the interpolated state."""
        return DenseSegment(
            t_start=self.t_start,
            t_end=t_new_end,
            h=self.h,
            y_start=self.y_start,
            y_end=self.evaluate(t_new_end),
            coeffs=self.coeffs,
        )


@dataclass
class Trajectory:
    """Time-ordered list of dense segments evaluated as one piecewise function."""

    segments: list[DenseSegment] = field(default_factory=list)

    def extend(self, segments: list[DenseSegment]) -> None:
        self.segments.extend(segments)

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def __call__(self, t: float) -> np.ndarray:
        """Evaluate at t; at a shared boundary the later (right-continuous) segment is used."""
        if not self.segments:
            raise IntegrationError("empty trajectory")
        if t < self.t_start or t > self.t_end:
            raise ValueError(f"t={t} outside [{self.t_start}, {self.t_end}]")
        starts = [seg.t_start for seg in self.segments]
        idx = max(bisect.bisect_right(starts, t) - 1, 0)
        seg = self.segments[idx]
        # zero-length segments can share a start time with their successor
        while t > seg.t_end and idx + 1 < len(self.segments):
            idx += 1
            seg = self.segments[idx]
        return seg.evaluate(min(t, seg.t_end))


class StepResult(NamedTuple):
    y_next: np.ndarray
    h_next: float
    segment: DenseSegment
    err_est: float
    f_next: np.ndarray


@dataclass(frozen=True)
class EventAt:
    """The guard crossed zero at ``t``; ``immediate`` marks a forced event at t0 + event_tol."""

    t: float
    y: np.ndarray
    immediate: bool = False


@dataclass(frozen=True)
class ReachedTmax:
    """No crossing before ``t``, the requested end of the interval."""

    t: float
    y: np.ndarray


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, cfg: IntegratorConfig) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(
    problem: OdeProblem, cfg: IntegratorConfig, t0: float, y0: np.ndarray, f0: np.ndarray
) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, cfg.max_step)
    y1 = y0 + h0 * f0
    f1 = np.asarray(problem.rhs(t0 + h0, y1), dtype=float)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 5.0)
    return min(100.0 * h0, h1, cfg.max_step)


def _attempt(
    problem: OdeProblem, t: float, y: np.ndarray, h: float, f0: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    k = np.empty((7, y.shape[0]))
    k[0] = f0
    for s in range(1, 6):
        dy = h * (_A[s] @ k[:s])
        k[s] = problem.rhs(t + _C[s] * h, y + dy)
    y_new = y + h * (_B @ k[:6])
    k[6] = problem.rhs(t + h, y_new)
    return y_new, k


def step(
    problem: OdeProblem,
    config: IntegratorConfig,
    t: float,
    y: np.ndarray,
    h: float,
    f0: np.ndarray | None = None,
    t_limit: float | None = None,
) -> StepResult:
    """
    Take one accepted Dormand-Prince step from (t, y), shrinking h on rejection.

    Args:
        problem: The ODE.
        config: Tolerances.
        t: Current time.
        y: Current state.
        h: Proposed step size, must be positive.
        f0: rhs(t, y) if already known (first-same-as-last reuse).
        t_limit: Do not step past this time.

    Returns:
        StepResult with the new state, the proposed next step size, the dense segment
        of the accepted step and its scaled error estimate.

    Raises:
        IntegratorConfigError: If h is not positive.
        StepSizeUnderflowError: If h shrinks below 1e-14 * max(1, |t|).
    """
    if not h > 0.0:
        raise IntegratorConfigError(f"step size must be positive, got {h}")
    y = np.asarray(y, dtype=float)
    if f0 is None:
        f0 = np.asarray(problem.rhs(t, y), dtype=float)
    h = min(h, config.max_step)
    if t_limit is not None:
        h = min(h, t_limit - t)

    while True:
        if h < _UNDERFLOW * max(1.0, abs(t)):
            raise StepSizeUnderflowError(f"step size {h:.3e} underflow at t={t:.6g}")
        y_new, k = _attempt(problem, t, y, h, f0)
        err = _error_norm(h * (_E @ k), y, y_new, config)
        if not np.isfinite(err):
            h *= _MIN_FACTOR
            continue
        if err <= 1.0:
            factor = _MAX_FACTOR if err == 0.0 else _SAFETY * err**_ERROR_EXPONENT
            h_next = min(h * min(_MAX_FACTOR, max(_MIN_FACTOR, factor)), config.max_step)
            t_new = t + h if t_limit is None or t + h < t_limit else t_limit
            segment = DenseSegment(
                t_start=t, t_end=t_new, h=h, y_start=y, y_end=y_new, coeffs=k.T @ _P
            )
            return StepResult(y_new, h_next, segment, err, k[6])
        h *= max(_MIN_FACTOR, _SAFETY * err**_ERROR_EXPONENT)


def _locate_crossing(
    segment: DenseSegment, guard: GuardFn, lo: float, hi: float, event_tol: float
) -> float:
    """Bisect on the interpolant; ``guard(lo) < 0 <= guard(hi)``. Returns the right end."""
    while hi - lo > event_tol:
        mid = 0.5 * (lo + hi)
        if guard(mid, segment.evaluate(mid)) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def integrate_until_event(
    problem: OdeProblem,
    config: IntegratorConfig,
    guard: GuardFn | None,
    t_max: float,
    immediate_event: bool = False,
    h0: float | None = None,
) -> tuple[EventAt | ReachedTmax, list[DenseSegment]]:
    """
    Integrate from ``problem.t0`` until the guard first becomes non-negative or ``t_max``.

    Args:
        problem: The ODE; integration starts at its (t0, y0).
        config: Integrator tolerances.
        guard: Signed margin, negative means no event. ``None`` integrates to t_max.
        t_max: End of the interval.
        immediate_event: If the guard is already non-negative at t0, report an event at
            ``t0 + event_tol`` instead of raising.
        h0: Initial step size; estimated when omitted.

    Returns:
        ``(outcome, segments)`` where outcome is :class:`EventAt` or :class:`ReachedTmax`
        and segments is the dense trajectory up to the outcome time.

    Raises:
        EventPreconditionError: If the guard starts non-negative without ``immediate_event``.
        IntegrationError: If the step size underflows.
    """
    t = float(problem.t0)
    y = problem.y0.copy()
    segments: list[DenseSegment] = []

    if t_max <= t:
        return ReachedTmax(t, y), segments

    f = np.asarray(problem.rhs(t, y), dtype=float)
    h = h0 if h0 is not None else _initial_step(problem, config, t, y, f)

    if guard is not None and guard(t, y) >= 0.0:
        if not immediate_event:
            raise EventPreconditionError(f"guard is non-negative at t0={t}")
        t_event = min(t + config.event_tol, t_max)
        result = step(problem, config, t, y, t_event - t, f0=f, t_limit=t_event)
        while result.segment.t_end < t_event:
            segments.append(result.segment)
            t, y, f = result.segment.t_end, result.y_next, result.f_next
            result = step(problem, config, t, y, t_event - t, f0=f, t_limit=t_event)
        segments.append(result.segment)
        logger.debug("immediate event at t=%.12g", t_event)
        return EventAt(t_event, result.segment.y_end.copy(), immediate=True), segments

    while t < t_max:
        result = step(problem, config, t, y, h, f0=f, t_limit=t_max)
        seg = result.segment
        if guard is not None:
            lo = seg.t_start
            for frac in _GUARD_SAMPLES:
                ts = seg.t_start + frac * (seg.t_end - seg.t_start)
                if guard(ts, seg.evaluate(ts)) >= 0.0:
                    t_event = _locate_crossing(seg, guard, lo, ts, config.event_tol)
                    seg = seg.truncate(t_event)
                    segments.append(seg)
                    return EventAt(t_event, seg.y_end.copy()), segments
                lo = ts
        segments.append(seg)
        t, y, f, h = seg.t_end, result.y_next, result.f_next, result.h_next

    return ReachedTmax(t_max, y.copy()), segments
