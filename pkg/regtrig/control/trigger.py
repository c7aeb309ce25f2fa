"""Control law, trigger margins and the event schedule."""

import math
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from regtrig.systems.base import NominalController


class ControlDimensionError(ValueError):
    """Raised when a state or parameter vector has the wrong length."""


def quadratic_offset(scale: float) -> Callable[[np.ndarray], float]:
    """Return a(x) = scale * |x|^2."""

    def a_fn(x: np.ndarray) -> float:
        return scale * float(np.dot(x, x))

    return a_fn


@dataclass(frozen=True)
class TriggerConfig:
    """
    Trigger parameters.

    Attributes:
        T: Longest allowed time between events.
        a_fn: Continuous positive definite offset a(x).
        eps: Constant added to the threshold; 0 gives the plain level trigger.
    """

    T: float
    a_fn: Callable[[np.ndarray], float]
    eps: float = 0.0

    def __post_init__(self) -> None:
        if not self.T > 0.0:
            raise ValueError(f"T must be > 0, got {self.T}")
        if self.eps < 0.0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")


def control(ctrl: "NominalController", theta_hat: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Certainty-equivalence input k(theta_hat, x)."""
    u = np.atleast_1d(np.asarray(ctrl.k(theta_hat, x), dtype=float))
    if u.shape != (ctrl.m,):
        raise ControlDimensionError(f"controller returned shape {u.shape}, expected ({ctrl.m},)")
    return u


def guard(
    ctrl: "NominalController",
    trig: TriggerConfig,
    theta_hat: np.ndarray,
    x_at_tau: np.ndarray,
    x_now: np.ndarray,
) -> float:
    """
    Signed margin V(theta_hat, x_now) - Q(theta_hat, x_at_tau) - a(x_at_tau) - eps.

    Negative while no event is due; the event fires at the first up-crossing of zero.
    """
    return (
        float(ctrl.V(theta_hat, x_now))
        - ctrl.Q(theta_hat, x_at_tau)
        - float(trig.a_fn(x_at_tau))
        - trig.eps
    )


def lti_guard(
    M: Callable[[np.ndarray], float],
    a: float,
    eps: float,
    theta_hat: np.ndarray,
    x_at_tau: np.ndarray,
    x_now: np.ndarray,
) -> float:
    """Norm margin |x_now| - |x_at_tau| sqrt(a + M(theta_hat)^2) - eps for linear plants."""
    bound = float(np.linalg.norm(x_at_tau)) * math.sqrt(a + float(M(theta_hat)) ** 2)
    return float(np.linalg.norm(x_now)) - bound - eps


def next_event_time(tau_i: float, r_i: float, T: float) -> float:
    """
    Schedule the next event at min(tau_i + T, r_i).

    Example:
        >>> next_event_time(6.0, 100.0, 3.0)
        9.0
    """
    if not (r_i > tau_i):
        raise ValueError(f"r_i={r_i} must be later than tau_i={tau_i}")
    return min(tau_i + T, r_i)


class Trigger(ABC):
    """A trigger margin bound to its configuration."""

    def __init__(self, config: TriggerConfig) -> None:
        self.config = config

    @property
    def T(self) -> float:
        return self.config.T

    @abstractmethod
    def margin(self, theta_hat: np.ndarray, x_at_tau: np.ndarray, x_now: np.ndarray) -> float:
        """Negative while no event is due."""


class LyapunovTrigger(Trigger):
    """Fires when V reaches the level Q(x(tau)) + a(x(tau)) + eps."""

    def __init__(self, ctrl: "NominalController", config: TriggerConfig) -> None:
        super().__init__(config)
        self.ctrl = ctrl

    def margin(self, theta_hat: np.ndarray, x_at_tau: np.ndarray, x_now: np.ndarray) -> float:
        return guard(self.ctrl, self.config, theta_hat, x_at_tau, x_now)


class NormTrigger(Trigger):
    """Fires when |x| exceeds |x(tau)| sqrt(a + M(theta_hat)^2)."""

    def __init__(
        self, config: TriggerConfig, M: Callable[[np.ndarray], float], a: float
    ) -> None:
        super().__init__(config)
        self.M = M
        self.a = a

    def margin(self, theta_hat: np.ndarray, x_at_tau: np.ndarray, x_now: np.ndarray) -> float:
        return lti_guard(self.M, self.a, self.config.eps, theta_hat, x_at_tau, x_now)
