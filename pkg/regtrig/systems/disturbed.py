"""
Scalar-parameter plant used for the robustness study.

    x1' = (theta + v1) x1^2 + x2 + v2,    x2' = u

with v1 = A1 sin(2t), v2 = A2 sin(2t). The identifier only sees the nominal
model; the disturbances act on the plant alone.
"""

import numpy as np

from regtrig.identification.identifier import (
    Accumulator,
    GenericAccumulator,
    GramSystem,
    IdentifierError,
    IdentifierState,
    Snapshot,
)
from regtrig.systems.base import (
    DisturbanceSpec,
    NominalController,
    PlantCatalogEntry,
    PlantModel,
)

NAME = "disturbed_s6"
A_SCALE = 1.0 / 20.0


def _f(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.array([x[1], float(np.atleast_1d(u)[0])])


def _g(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.array([[x[0] ** 2], [0.0]])


def disturbance_drift(t: float, x: np.ndarray, spec: DisturbanceSpec) -> np.ndarray:
    v1, v2 = spec.values(t)
    return np.array([v1 * x[0] ** 2 + v2, 0.0])


def _slope(theta: float, x1: float) -> float:
    return 1.0 + 2.0 * theta * x1 + 3.0 * x1**2


def _error(theta: float, x: np.ndarray) -> float:
    x1, x2 = x
    return x2 + x1 + x1**3 + theta * x1**2


def disturbed_k(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    th = float(np.atleast_1d(theta)[0])
    x1, x2 = x
    a1 = _slope(th, x1)
    return np.array(
        [
            -x1
            - a1 * (th * x1**2 + x2)
            - 0.5 * _error(th, x) * (1.0 + a1**2 * (1.0 + x1**4))
        ]
    )


def disturbed_V(theta: np.ndarray, x: np.ndarray) -> float:
    th = float(np.atleast_1d(theta)[0])
    return 0.5 * x[0] ** 2 + 0.5 * _error(th, x) ** 2


def disturbed_V_gradient(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    th = float(np.atleast_1d(theta)[0])
    e = _error(th, x)
    return np.array([x[0] + e * _slope(th, x[0]), e])


def iss_bound(V: float, v1: float, v2: float) -> float:
    """Right-hand side of the dissipation inequality V' <= -V + (2 + v1^2) v1^2 / 4 + v2^2."""
    return -V + (2.0 + v1**2) / 4.0 * v1**2 + v2**2


class ExtendedMatchingController:
    """
    Conventional continuous adaptive controller used as a comparator.

    theta_hat' = gamma x1^2 S and u = k(theta_hat, x) - gamma x1^4 S with
    S = x1 + (x2 + x1 + x1^3 + theta_hat x1^2)(1 + 2 theta_hat x1 + 3 x1^2).
    """

    def __init__(self, gamma: float = 5.0) -> None:
        if not gamma > 0.0:
            raise ValueError(f"gamma must be > 0, got {gamma}")
        self.gamma = gamma

    def _s(self, theta_hat: np.ndarray, x: np.ndarray) -> float:
        th = float(np.atleast_1d(theta_hat)[0])
        return x[0] + _error(th, x) * _slope(th, x[0])

    def theta_rate(self, theta_hat: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.array([self.gamma * x[0] ** 2 * self._s(theta_hat, x)])

    def control(self, theta_hat: np.ndarray, x: np.ndarray) -> np.ndarray:
        return disturbed_k(theta_hat, x) - self.gamma * x[0] ** 4 * self._s(theta_hat, x)

    def V(self, theta_hat: np.ndarray, x: np.ndarray) -> float:
        return disturbed_V(theta_hat, x)


def comparator_extended_matching(gamma: float = 5.0) -> ExtendedMatchingController:
    return ExtendedMatchingController(gamma)


def explicit_scalar_rhs(x: np.ndarray, block: np.ndarray) -> np.ndarray:
    """
    Derivative of the block (eta, zeta, z1, ..., z7).

    eta and zeta are the double integrals over [0, t] of (int x1^2)^2 and of
    (int x1^2)(x1(t) - x1(s) - int x2) respectively.
    """
    x1, x2 = x
    _, _, z1, z2, z3, z4, z5, z6, z7 = block
    innovation = x1 - z7
    return np.array(
        [
            2.0 * z2 + 2.0 * z6 * z1**2 - 4.0 * z1 * z3,
            2.0 * innovation * (z6 * z1 - z3) + 2.0 * z5 - 2.0 * z1 * z4,
            x1**2,
            z1**2,
            z1,
            innovation,
            innovation * z1,
            1.0,
            x2,
        ]
    )


class ExplicitScalarAccumulator(Accumulator):
    """
    Generic accumulator plus the explicit nine-state double-integral block.

    The Gram system it reports is ``([[eta]], [zeta])``, the literal double
    integrals over [0, tau]; only windows starting at 0 are supported.
    """

    BLOCK = 9

    def __init__(self, plant: PlantModel) -> None:
        super().__init__(plant.n, plant.l, "double")
        self.generic = GenericAccumulator(plant)

    @property
    def size(self) -> int:
        return self.generic.size + self.BLOCK

    def derivative(self, x: np.ndarray, u: np.ndarray, raw: np.ndarray) -> np.ndarray:
        k = self.generic.size
        return np.concatenate(
            [self.generic.derivative(x, u, raw[:k]), explicit_scalar_rhs(x, raw[k:])]
        )

    def view(self, raw: np.ndarray, x: np.ndarray) -> IdentifierState:
        return self.generic.view(raw[: self.generic.size], x)

    def block(self, snapshot: Snapshot) -> np.ndarray:
        if snapshot.raw is None:
            raise IdentifierError("snapshot carries no raw accumulator vector")
        return snapshot.raw[self.generic.size :]

    def gram(self, at_tau: Snapshot, at_mu: Snapshot) -> GramSystem:
        if at_mu.t != 0.0:
            raise IdentifierError(
                f"the explicit double-integral block needs windows starting at 0, got {at_mu.t}"
            )
        eta, zeta = self.block(at_tau)[:2]
        return GramSystem(G=np.array([[eta]]), Z=np.array([zeta]))


def scalar_double_integral_block(plant: PlantModel | None = None) -> ExplicitScalarAccumulator:
    """Accumulator realizing the explicit scalar update; hold the estimate while eta < eps."""
    return ExplicitScalarAccumulator(plant or example_disturbed().plant)


def _make_accumulator(plant: PlantModel):
    def factory(variant: str) -> Accumulator:
        if variant == "explicit_scalar":
            return ExplicitScalarAccumulator(plant)
        return GenericAccumulator(plant, variant)

    return factory


def example_disturbed() -> PlantCatalogEntry:
    """Catalog entry of the robustness-study plant; exact estimate after one event."""
    plant = PlantModel(name=NAME, n=2, m=1, l=1, f=_f, g=_g)
    controller = NominalController(m=1, k=disturbed_k, V=disturbed_V)
    return PlantCatalogEntry(
        plant=plant,
        controller=controller,
        N_h3=1,
        defaults={
            "theta_true": [1.0],
            "theta_hat0": [-4.0],
            "x0": [1.0, 1.0],
            "T": 3.0,
            "N_tilde": 7,
            "a_scale": A_SCALE,
            "eps": 1e-6,
            "gamma": 5.0,
            "t_end": 20.0,
        },
        disturbance=disturbance_drift,
        make_accumulator=_make_accumulator(plant),
    )
