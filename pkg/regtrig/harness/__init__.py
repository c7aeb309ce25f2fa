"""Running, emitting and comparing scenarios."""

from regtrig.harness.compare import Comparison, RunTable, compare, write_comparison
from regtrig.harness.emit import build_sampling_grid, emit, events_frame, sample_trajectory
from regtrig.harness.runner import ScenarioError, run_batch, run_scenario
from regtrig.harness.selftest import CheckResult, run_selftest

__all__ = [
    "CheckResult",
    "Comparison",
    "RunTable",
    "ScenarioError",
    "build_sampling_grid",
    "compare",
    "emit",
    "events_frame",
    "run_batch",
    "run_scenario",
    "run_selftest",
    "sample_trajectory",
    "write_comparison",
]
