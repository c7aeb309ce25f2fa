"""Numerical building blocks: small dense linear algebra and hybrid ODE integration."""

from regtrig.numerics.hybrid_ode import (
    DenseSegment,
    EventAt,
    IntegratorConfig,
    OdeProblem,
    ReachedTmax,
    Trajectory,
    integrate_until_event,
    step,
)
from regtrig.numerics.linalg import SymEig, min_norm_update, sym_eig, tikhonov_update

__all__ = [
    "DenseSegment",
    "EventAt",
    "IntegratorConfig",
    "OdeProblem",
    "ReachedTmax",
    "SymEig",
    "Trajectory",
    "integrate_until_event",
    "min_norm_update",
    "step",
    "sym_eig",
    "tikhonov_update",
]
