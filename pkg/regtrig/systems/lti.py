"""Linear plants x' = A x + B u + sum_j theta_j C_j x with the reduced filter realization."""

import numpy as np

from regtrig.control.trigger import NormTrigger, TriggerConfig
from regtrig.identification.identifier import Accumulator, IdentifierState
from regtrig.systems.base import LtiSpec, NominalController, PlantCatalogEntry, PlantModel

NAME = "lti_custom"


class LtiAccumulator(Accumulator):
    """
    Filters zeta' = x, omega' = u instead of integrating f and g directly.

    Raw layout: zeta (n), omega (m), w (n), phi (l), Q (n x l), R (l x l). The
    generic quantities follow as z = A zeta + B omega and B = L*(zeta).
    """

    def __init__(self, spec: LtiSpec, variant: str = "double") -> None:
        super().__init__(spec.n, spec.l, variant)
        self.spec = spec

    @property
    def size(self) -> int:
        n, m, l = self.spec.n, self.spec.m, self.spec.l
        return 2 * n + m + l + n * l + l * l

    def _split(self, raw: np.ndarray) -> list[np.ndarray]:
        n, m, l = self.spec.n, self.spec.m, self.spec.l
        parts = []
        i = 0
        for shape in ((n,), (m,), (n,), (l,), (n, l), (l, l)):
            count = int(np.prod(shape))
            parts.append(raw[i : i + count].reshape(shape))
            i += count
        return parts

    def derivative(self, x: np.ndarray, u: np.ndarray, raw: np.ndarray) -> np.ndarray:
        zeta, omega, _, _, _, _ = self._split(raw)
        reg = self.spec.L_star(zeta)
        y = x - self.spec.A @ zeta - self.spec.B @ omega
        return np.concatenate(
            [x, np.atleast_1d(u), y, reg.T @ y, reg.ravel(), (reg.T @ reg).ravel()]
        )

    def view(self, raw: np.ndarray, x: np.ndarray) -> IdentifierState:
        zeta, omega, w, phi, Q, R = self._split(np.asarray(raw, dtype=float))
        return IdentifierState(
            z=self.spec.A @ zeta + self.spec.B @ omega,
            w=w.copy(),
            B=self.spec.L_star(zeta),
            phi=phi.copy(),
            Q=Q.copy(),
            R=R.copy(),
        )


def affine_lti_spec(
    A: list,
    B: list,
    C: list,
    K0: list,
    K: list,
    M: float = 1.0,
    a: float = 1.0,
) -> LtiSpec:
    """LtiSpec with gain K(theta) = K0 + sum_j theta_j K_j and constant overshoot bound M."""
    if M < 1.0:
        raise ValueError(f"M must be >= 1, got {M}")
    A_ = np.atleast_2d(np.asarray(A, dtype=float))
    B_ = np.atleast_2d(np.asarray(B, dtype=float))
    C_ = [np.atleast_2d(np.asarray(c, dtype=float)) for c in C]
    K0_ = np.atleast_2d(np.asarray(K0, dtype=float))
    K_ = [np.atleast_2d(np.asarray(k, dtype=float)) for k in K]
    if len(K_) != len(C_):
        raise ValueError(f"need one gain slope per parameter: {len(K_)} != {len(C_)}")

    def gain(theta: np.ndarray) -> np.ndarray:
        return K0_ + sum((th * kj for th, kj in zip(theta, K_)), np.zeros_like(K0_))

    return LtiSpec(A=A_, B=B_, C=C_, K=gain, M=lambda theta: float(M), a=float(a))


def scalar_lti_spec() -> LtiSpec:
    """x' = theta x + u with u = -(theta + 1) x, M = 1, a = 1."""
    return affine_lti_spec(A=[[0.0]], B=[[1.0]], C=[[[1.0]]], K0=[[-1.0]], K=[[[-1.0]]])


def example_lti(spec: LtiSpec | None = None) -> PlantCatalogEntry:
    """Catalog entry of a linear plant; the scalar instance when no spec is given."""
    spec = spec or scalar_lti_spec()

    def f(x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return spec.A @ x + spec.B @ np.atleast_1d(u)

    def g(x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return spec.L_star(x)

    def k(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        return spec.K(theta) @ x

    def V(theta: np.ndarray, x: np.ndarray) -> float:
        return float(np.linalg.norm(x))

    def make_trigger(config: TriggerConfig) -> NormTrigger:
        return NormTrigger(config, spec.M, spec.a)

    return PlantCatalogEntry(
        plant=PlantModel(name=NAME, n=spec.n, m=spec.m, l=spec.l, f=f, g=g),
        controller=NominalController(m=spec.m, k=k, V=V),
        N_h3=1,
        defaults={"T": 1.0, "N_tilde": 2, "eps": 0.0},
        make_accumulator=lambda variant: LtiAccumulator(spec, variant),
        make_trigger=make_trigger,
    )
