"""Interfaces shared by every plant in the catalog."""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

if TYPE_CHECKING:
    from regtrig.control.trigger import Trigger, TriggerConfig
    from regtrig.identification.identifier import Accumulator

Vector = np.ndarray
ParamFn = Callable[[np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class PlantModel:
    """
    Plant x' = f(x, u) + g(x, u) theta with unknown constant theta.

    Attributes:
        name: Catalog name.
        n: State dimension.
        m: Input dimension.
        l: Number of unknown parameters.
        f: Drift, returns a length-n vector.
        g: Regressor, returns an n x l matrix.
    """

    name: str
    n: int
    m: int
    l: int
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    g: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def rhs(self, x: np.ndarray, u: np.ndarray, theta: np.ndarray) -> np.ndarray:
        regressor = np.asarray(self.g(x, u), dtype=float).reshape(self.n, self.l)
        return np.asarray(self.f(x, u), dtype=float) + regressor @ np.asarray(theta, dtype=float)


@dataclass(frozen=True)
class NominalController:
    """
    Known-parameter feedback k(theta, x) with its Lyapunov pair.

    ``V`` decreases along the closed loop with the true parameter and
    ``V(theta, x(t)) <= Q(theta, x(0))``. When ``Q_fn`` is omitted Q is V.
    """

    m: int
    k: Callable[[np.ndarray, np.ndarray], np.ndarray]
    V: ParamFn
    Q_fn: ParamFn | None = None

    def Q(self, theta: np.ndarray, x: np.ndarray) -> float:
        if self.Q_fn is None:
            return float(self.V(theta, x))
        return float(self.Q_fn(theta, x))


@dataclass(frozen=True)
class DisturbanceSpec:
    """Sinusoidal process disturbances v1 = A1 sin(omega t), v2 = A2 sin(omega t)."""

    A1: float = 0.0
    A2: float = 0.0
    omega: float = 2.0

    def __post_init__(self) -> None:
        if self.A1 < 0.0 or self.A2 < 0.0:
            raise ValueError(f"disturbance amplitudes must be >= 0, got A1={self.A1}, A2={self.A2}")

    @property
    def active(self) -> bool:
        return self.A1 != 0.0 or self.A2 != 0.0

    def values(self, t: float) -> tuple[float, float]:
        s = np.sin(self.omega * t)
        return self.A1 * s, self.A2 * s


@dataclass(frozen=True)
class LtiSpec:
    """
    Linear plant x' = A x + B u + sum_j theta_j C_j x with gain K(theta).

    Attributes:
        A: n x n drift matrix.
        B: n x m input matrix.
        C: One n x n matrix per unknown parameter.
        K: Feedback gain, theta -> m x n.
        M: Overshoot bound of the nominal loop, theta -> [1, inf).
        a: Trigger constant, > 0.
    """

    A: np.ndarray
    B: np.ndarray
    C: list[np.ndarray]
    K: Callable[[np.ndarray], np.ndarray]
    M: Callable[[np.ndarray], float]
    a: float = 1.0

    def __post_init__(self) -> None:
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.B.ndim != 2 or self.B.shape[0] != n:
            raise ValueError(f"inconsistent LTI shapes: A {self.A.shape}, B {self.B.shape}")
        if not self.C or any(c.shape != (n, n) for c in self.C):
            raise ValueError("C must be a non-empty list of n x n matrices")
        if not self.a > 0.0:
            raise ValueError(f"trigger constant a must be > 0, got {self.a}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def l(self) -> int:
        return len(self.C)

    def L_star(self, x: np.ndarray) -> np.ndarray:
        """Regressor [C_1 x, ..., C_l x] as an n x l matrix."""
        return np.column_stack([c @ x for c in self.C])


@dataclass(frozen=True)
class PlantCatalogEntry:
    """
    A plant, its nominal controller and the hooks the closed loop needs.

    Attributes:
        plant: The plant model.
        controller: Nominal feedback and Lyapunov pair.
        N_h3: Number of events after which the estimate is exact.
        defaults: Scenario parameters the source example uses.
        disturbance: Extra drift d(t, x, spec) not seen by the identifier.
        make_accumulator: Builds the accumulator realization for a variant name.
        make_trigger: Builds the trigger; ``None`` uses the Lyapunov-level trigger.
    """

    plant: PlantModel
    controller: NominalController
    N_h3: int
    defaults: dict[str, Any] = field(default_factory=dict)
    disturbance: Callable[[float, np.ndarray, DisturbanceSpec], np.ndarray] | None = None
    make_accumulator: Callable[[str], "Accumulator"] | None = None
    make_trigger: Callable[["TriggerConfig"], "Trigger"] | None = None

    def __post_init__(self) -> None:
        if self.N_h3 < 1:
            raise ValueError(f"N_h3 must be >= 1, got {self.N_h3}")

    @property
    def name(self) -> str:
        return self.plant.name
