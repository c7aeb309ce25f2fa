"""Planar example with two unknown parameters and a backstepping controller.

Plant: x1' = x2 + theta1 x1 + theta2 x1^2, x2' = u.
"""

import numpy as np

from regtrig.systems.base import NominalController, PlantCatalogEntry, PlantModel

NAME = "planar_s5"


def _f(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.array([x[1], float(np.atleast_1d(u)[0])])


def _g(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.array([[x[0], x[0] ** 2], [0.0, 0.0]])


def _error(theta: np.ndarray, x: np.ndarray) -> float:
    x1, x2 = x
    return x2 + x1 + theta[0] * x1 + theta[1] * x1**2


def planar_k(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Backstepping feedback; makes V decay as exp(-2t) when theta is exact."""
    th1, th2 = theta
    x1, x2 = x
    return np.array(
        [
            -x1
            - (1.0 + th1 + 2.0 * th2 * x1) * (x2 + th1 * x1 + th2 * x1**2)
            - _error(theta, x)
        ]
    )


def planar_V(theta: np.ndarray, x: np.ndarray) -> float:
    return 0.5 * x[0] ** 2 + 0.5 * _error(theta, x) ** 2


def coercivity_radius(level: float, rho: float) -> float:
    """Bound on |x| over the sublevel set {V <= level} for |theta| <= rho."""
    return (3.0 + rho) * np.sqrt(2.0 * level) + 2.0 * rho * level


def sandwich_constants(rho: float, radius: float) -> tuple[float, float]:
    """(K1, K2) with K1 |x|^2 <= V <= K2 |x|^2 for |x| <= radius, |theta| <= rho."""
    c = 1.0 + rho + rho * radius
    return 1.0 / (4.0 * c * c + 2.0), c * c + 0.5


def example_planar() -> PlantCatalogEntry:
    """Catalog entry of the planar plant; exact estimates after two events."""
    plant = PlantModel(name=NAME, n=2, m=1, l=2, f=_f, g=_g)
    controller = NominalController(m=1, k=planar_k, V=planar_V)
    return PlantCatalogEntry(
        plant=plant,
        controller=controller,
        N_h3=2,
        defaults={"T": 1.0, "N_tilde": 3, "a_scale": 0.05, "eps": 0.0},
    )
