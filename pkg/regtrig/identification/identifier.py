"""
Accumulator filters, windowed Gram systems and parameter updates.

Along a solution of x' = f(x, u) + g(x, u) theta the filters

    z' = f,  w' = x - z,  B' = g,  phi' = B'(x - z),  Q' = B,  R' = B'B

started from zero make every windowed least-squares quantity an algebraic
function of two snapshots. With ``D`` the difference between the snapshot at the
window end and the one at its start and ``dt`` the window length:

    G = dt * D[R] - D[Q]' D[Q],    Z = dt * D[phi] - D[Q]' D[w]

These are one half of the double integrals over the window, a common factor
that leaves the solution set of ``G theta = Z`` unchanged.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np

from regtrig.numerics.linalg import min_norm_update, sym_eig, tikhonov_update

if TYPE_CHECKING:
    from regtrig.systems.base import PlantModel

logger = logging.getLogger(__name__)

_PSD_TOL = 1e-9
_TIME_TOL = 1e-12


class IdentifierError(ValueError):
    """Base class for identifier failures."""


class WindowOrderError(IdentifierError):
    """Raised when a window's start snapshot is later than its end snapshot."""


@dataclass
class IdentifierState:
    """
    Accumulator state (z, w, B, phi, Q, R).

    Attributes:
        z: Integral of f, length n.
        w: Integral of x - z, length n.
        B: Integral of g, n x l.
        phi: Integral of B'(x - z), length l.
        Q: Integral of B, n x l.
        R: Integral of B'B, l x l.
    """

    z: np.ndarray
    w: np.ndarray
    B: np.ndarray
    phi: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    @classmethod
    def zeros(cls, n: int, l: int) -> "IdentifierState":
        return cls(
            z=np.zeros(n),
            w=np.zeros(n),
            B=np.zeros((n, l)),
            phi=np.zeros(l),
            Q=np.zeros((n, l)),
            R=np.zeros((l, l)),
        )

    @staticmethod
    def size(n: int, l: int) -> int:
        return 2 * n + 2 * n * l + l + l * l

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def l(self) -> int:  # noqa: E743
        return self.phi.shape[0]

    def pack(self) -> np.ndarray:
        return np.concatenate(
            [self.z, self.w, self.B.ravel(), self.phi, self.Q.ravel(), self.R.ravel()]
        )

    @classmethod
    def unpack(cls, vec: np.ndarray, n: int, l: int) -> "IdentifierState":
        vec = np.asarray(vec, dtype=float)
        if vec.shape[0] != cls.size(n, l):
            raise IdentifierError(
                f"state vector has length {vec.shape[0]}, expected {cls.size(n, l)}"
            )
        i = 0
        parts = []
        for shape in ((n,), (n,), (n, l), (l,), (n, l), (l, l)):
            count = int(np.prod(shape))
            parts.append(vec[i : i + count].reshape(shape))
            i += count
        return cls(*parts)


@dataclass(frozen=True)
class Snapshot:
    """Accumulator state captured at time ``t``; ``raw`` keeps the realization's own vector."""

    t: float
    x: np.ndarray
    state: IdentifierState
    raw: np.ndarray | None = None


@dataclass(frozen=True)
class GramSystem:
    """Normal-equation pair: the true parameter satisfies ``G theta = Z`` on noise-free data."""

    G: np.ndarray
    Z: np.ndarray

    def scaled(self, factor: float) -> "GramSystem":
        return GramSystem(G=factor * self.G, Z=factor * self.Z)

    def is_psd(self) -> bool:
        if self.G.size == 0:
            return True
        lam = sym_eig(self.G).eigenvalues
        return bool(lam[-1] >= -_PSD_TOL * max(1.0, float(np.linalg.norm(self.G))))


@dataclass(frozen=True)
class WindowSpec:
    """Moving window: at most ``N_tilde * T`` of history back from the newest event."""

    N_tilde: int
    T: float

    def __post_init__(self) -> None:
        if self.N_tilde < 1:
            raise IdentifierError(f"N_tilde must be >= 1, got {self.N_tilde}")
        if not self.T > 0.0:
            raise IdentifierError(f"T must be > 0, got {self.T}")

    @property
    def length(self) -> float:
        return self.N_tilde * self.T


def accumulator_rhs(
    plant: "PlantModel", x: np.ndarray, u: np.ndarray, state: IdentifierState
) -> IdentifierState:
    """
    Time derivative of the accumulator state.

    Returns:
        ``(f(x,u), x - z, g(x,u), B'(x - z), B, B'B)`` as an IdentifierState.

    Raises:
        IdentifierError: If x or the state do not match the plant dimensions.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (plant.n,) or state.n != plant.n or state.l != plant.l:
        raise IdentifierError(
            f"dimension mismatch: plant (n={plant.n}, l={plant.l}), x {x.shape}, "
            f"state (n={state.n}, l={state.l})"
        )
    y = x - state.z
    return IdentifierState(
        z=np.asarray(plant.f(x, u), dtype=float),
        w=y,
        B=np.asarray(plant.g(x, u), dtype=float).reshape(plant.n, plant.l),
        phi=state.B.T @ y,
        Q=state.B.copy(),
        R=state.B.T @ state.B,
    )


def mu_index(event_times: Sequence[float], i: int, window: WindowSpec) -> tuple[float, int]:
    """
    Start of the identification window ending at event ``i + 1``.

    Args:
        event_times: Event times tau_0, ..., tau_{i+1} (at least i + 2 entries).
        i: Index of the last event before the window end.
        window: Window length parameters.

    Returns:
        ``(mu_time, j)``, the earliest tau_j with j <= i and tau_j >= tau_{i+1} - N_tilde * T.

    Example:
        >>> mu_index([0.0, 3.0, 6.0, 9.0], 2, WindowSpec(N_tilde=2, T=3.0))
        (3.0, 1)
    """
    if len(event_times) < i + 2:
        raise IdentifierError(f"need event times up to index {i + 1}, got {len(event_times)}")
    tau_next = event_times[i + 1]
    cutoff = tau_next - window.length
    slack = _TIME_TOL * max(1.0, abs(cutoff))
    for j in range(i + 1):
        if event_times[j] >= cutoff - slack:
            return float(event_times[j]), j
    # unreachable when inter-event gaps are <= T; fall back to the newest event
    return float(event_times[i]), i


def _differences(at_tau: Snapshot, at_mu: Snapshot) -> tuple[float, IdentifierState]:
    dt = at_tau.t - at_mu.t
    if dt < 0.0:
        raise WindowOrderError(f"window start {at_mu.t} is after window end {at_tau.t}")
    a, b = at_tau.state, at_mu.state
    diff = IdentifierState(
        z=a.z - b.z, w=a.w - b.w, B=a.B - b.B, phi=a.phi - b.phi, Q=a.Q - b.Q, R=a.R - b.R
    )
    return dt, diff


def gram_from_snapshots(at_tau: Snapshot, at_mu: Snapshot) -> GramSystem:
    """
    Double-integral Gram system over [mu, tau] from two snapshots.

    A zero-width window gives G = 0, Z = 0.

    Raises:
        WindowOrderError: If ``at_mu.t > at_tau.t``.
    """
    dt, d = _differences(at_tau, at_mu)
    if dt == 0.0:
        l = at_tau.state.l
        return GramSystem(G=np.zeros((l, l)), Z=np.zeros(l))
    G = dt * d.R - d.Q.T @ d.Q
    Z = dt * d.phi - d.Q.T @ d.w
    return GramSystem(G=0.5 * (G + G.T), Z=Z)


def gram_single_integral(at_tau: Snapshot, at_mu: Snapshot) -> GramSystem:
    """
    Single-integral Gram system anchored at the window start.

    Integrates q(t, mu)'q(t, mu) and q(t, mu)'p(t, mu) over [mu, tau] with
    q(t, mu) = B(t) - B(mu) and p(t, mu) = y(t) - y(mu), y = x - z.

    Raises:
        WindowOrderError: If ``at_mu.t > at_tau.t``.
    """
    dt, d = _differences(at_tau, at_mu)
    l = at_tau.state.l
    if dt == 0.0:
        return GramSystem(G=np.zeros((l, l)), Z=np.zeros(l))
    b_mu = at_mu.state.B
    y_mu = at_mu.x - at_mu.state.z
    G = d.R - d.Q.T @ b_mu - b_mu.T @ d.Q + dt * b_mu.T @ b_mu
    Z = d.phi - d.Q.T @ y_mu - b_mu.T @ d.w + dt * b_mu.T @ y_mu
    return GramSystem(G=0.5 * (G + G.T), Z=Z)


@dataclass(frozen=True)
class MinNorm:
    """Project onto the constraint set, dropping eigenvalues below rank_tol * max(1, lambda_max)."""

    rank_tol: float = 1e-9
    name = "min_norm"


@dataclass(frozen=True)
class Tikhonov:
    """Solve (eta I + G) theta = Z."""

    eta: float = 1e-8
    name = "tikhonov"


@dataclass(frozen=True)
class DeadZone:
    """Hold the estimate while lambda_max(G) < eps, otherwise project like MinNorm."""

    rank_tol: float = 1e-9
    eps: float = 1e-6
    name = "dead_zone"


UpdatePolicy = Union[MinNorm, Tikhonov, DeadZone]


@dataclass(frozen=True)
class UpdateReport:
    """Outcome of one parameter update."""

    rank: int
    residual: float
    skipped: bool
    policy: str
    lambda_max: float = 0.0


def update_estimate(
    theta_prev: np.ndarray, gram: GramSystem, policy: UpdatePolicy
) -> tuple[np.ndarray, UpdateReport]:
    """
    Compute the estimate for the next inter-event interval.

    Args:
        theta_prev: Estimate in force before the event.
        gram: Windowed normal equations.
        policy: MinNorm, Tikhonov or DeadZone.

    Returns:
        ``(theta_new, report)``.
    """
    theta_prev = np.asarray(theta_prev, dtype=float).reshape(-1)
    l = theta_prev.shape[0]
    lam_max = float(sym_eig(gram.G).eigenvalues[0]) if l else 0.0

    if isinstance(policy, Tikhonov):
        theta = tikhonov_update(gram.G, gram.Z, policy.eta)
        residual = float(np.linalg.norm(gram.G @ theta - gram.Z))
        rank = int(np.linalg.matrix_rank(gram.G)) if l else 0
        return theta, UpdateReport(rank, residual, False, policy.name, lam_max)

    if isinstance(policy, DeadZone) and lam_max < policy.eps:
        logger.debug("update held: lambda_max(G)=%.3e < eps=%.3e", lam_max, policy.eps)
        return theta_prev.copy(), UpdateReport(0, 0.0, True, policy.name, lam_max)

    if not isinstance(policy, (MinNorm, DeadZone)):
        raise IdentifierError(f"unknown update policy {policy!r}")
    theta, rank, residual = min_norm_update(gram.G, gram.Z, theta_prev, policy.rank_tol)
    if 0 < rank < l:
        logger.warning("rank-deficient Gram system: rank %d < %d", rank, l)
    return theta, UpdateReport(rank, residual, rank == 0, policy.name, lam_max)


class Accumulator(ABC):
    """
    A realization of the accumulator filters as extra ODE states.

    Subclasses choose the state vector they integrate (``raw``) and expose it
    through :meth:`view` as an :class:`IdentifierState`, so Gram construction is
    shared.
    """

    def __init__(self, n: int, l: int, variant: str = "double") -> None:
        if variant not in ("double", "single"):
            raise IdentifierError(f"Unknown identifier variant '{variant}'")
        self.n = n
        self.l = l
        self.variant = variant

    @property
    @abstractmethod
    def size(self) -> int:
        """Length of the raw state vector."""

    @abstractmethod
    def derivative(self, x: np.ndarray, u: np.ndarray, raw: np.ndarray) -> np.ndarray:
        """Time derivative of the raw state."""

    @abstractmethod
    def view(self, raw: np.ndarray, x: np.ndarray) -> IdentifierState:
        """Express the raw state as (z, w, B, phi, Q, R)."""

    def initial(self) -> np.ndarray:
        return np.zeros(self.size)

    def snapshot(self, t: float, x: np.ndarray, raw: np.ndarray) -> Snapshot:
        x = np.array(x, dtype=float)
        return Snapshot(t=t, x=x, state=self.view(raw, x), raw=np.array(raw, dtype=float))

    def gram(self, at_tau: Snapshot, at_mu: Snapshot) -> GramSystem:
        if self.variant == "single":
            return gram_single_integral(at_tau, at_mu)
        return gram_from_snapshots(at_tau, at_mu)


class GenericAccumulator(Accumulator):
    """Integrates the accumulator state of any plant verbatim."""

    def __init__(self, plant: "PlantModel", variant: str = "double") -> None:
        super().__init__(plant.n, plant.l, variant)
        self.plant = plant

    @property
    def size(self) -> int:
        return IdentifierState.size(self.n, self.l)

    def derivative(self, x: np.ndarray, u: np.ndarray, raw: np.ndarray) -> np.ndarray:
        state = IdentifierState.unpack(raw, self.n, self.l)
        return accumulator_rhs(self.plant, x, u, state).pack()

    def view(self, raw: np.ndarray, x: np.ndarray) -> IdentifierState:
        return IdentifierState.unpack(raw, self.n, self.l)

