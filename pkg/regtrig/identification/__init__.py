"""Finite-time least-squares identification from accumulator snapshots."""

from regtrig.identification.identifier import (
    Accumulator,
    DeadZone,
    GenericAccumulator,
    GramSystem,
    IdentifierError,
    IdentifierState,
    MinNorm,
    Snapshot,
    Tikhonov,
    UpdateReport,
    WindowOrderError,
    WindowSpec,
    accumulator_rhs,
    gram_from_snapshots,
    gram_single_integral,
    mu_index,
    update_estimate,
)

__all__ = [
    "Accumulator",
    "DeadZone",
    "GenericAccumulator",
    "GramSystem",
    "IdentifierError",
    "IdentifierState",
    "MinNorm",
    "Snapshot",
    "Tikhonov",
    "UpdateReport",
    "WindowOrderError",
    "WindowSpec",
    "accumulator_rhs",
    "gram_from_snapshots",
    "gram_single_integral",
    "mu_index",
    "update_estimate",
]
