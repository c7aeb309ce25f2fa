"""Side-by-side comparison of runs on a common time grid."""

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from regtrig.control.closed_loop import RunResult
from regtrig.harness.emit import sample_trajectory

logger = logging.getLogger(__name__)

TERMINAL_FRACTION = 0.25


@dataclass
class RunTable:
    """A sampled run: trajectory table plus the true parameter."""

    name: str
    frame: pd.DataFrame
    theta_true: np.ndarray

    def columns(self, prefix: str) -> list[str]:
        return [
            c
            for c in self.frame.columns
            if c.startswith(prefix) and c[len(prefix) :].isdigit()
        ]

    def state(self) -> np.ndarray:
        return self.frame[self.columns("x")].to_numpy()

    def theta_error(self) -> np.ndarray:
        th = self.frame[self.columns("th")].to_numpy()
        return np.linalg.norm(th - self.theta_true, axis=1)

    @classmethod
    def from_result(cls, result: RunResult, name: str) -> "RunTable":
        return cls(name=name, frame=sample_trajectory(result), theta_true=result.theta_true)

    @classmethod
    def from_dir(cls, directory: str | Path) -> "RunTable":
        """Read trajectory.csv and summary.json written by :func:`emit`."""
        directory = Path(directory)
        summary = json.loads((directory / "summary.json").read_text())
        frame = pd.read_csv(directory / "trajectory.csv")
        return cls(
            name=summary.get("name", directory.name),
            frame=frame,
            theta_true=np.asarray(summary["theta_true"], dtype=float),
        )


@dataclass
class Comparison:
    """
    Result of :func:`compare`.

    Attributes:
        table: Per-time columns ``t``, ``theta_err_<name>`` for every run and
            ``x_delta_<name>`` (distance to the first run) for the others.
        metrics: One row per run with overshoot and terminal-window measures.
    """

    table: pd.DataFrame
    metrics: pd.DataFrame


def _common_grid(runs: list[RunTable]) -> np.ndarray:
    grids = [r.frame["t"].to_numpy() for r in runs]
    if all(g.shape == grids[0].shape and np.array_equal(g, grids[0]) for g in grids):
        return grids[0]
    coarse = min(grids, key=len)
    lo = max(g[0] for g in grids)
    hi = min(g[-1] for g in grids)
    logger.warning("runs use different time grids; resampling to %d points", len(coarse))
    return coarse[(coarse >= lo) & (coarse <= hi)]


def _resample(run: RunTable, grid: np.ndarray) -> RunTable:
    t = run.frame["t"].to_numpy()
    if t.shape == grid.shape and np.array_equal(t, grid):
        return run
    frame = pd.DataFrame({"t": grid})
    for col in run.frame.columns:
        if col != "t":
            frame[col] = np.interp(grid, t, run.frame[col].to_numpy())
    return RunTable(run.name, frame, run.theta_true)


def compare(
    results: Sequence[RunResult | RunTable],
    names: Sequence[str] | None = None,
    since: float = 0.0,
    terminal_window: tuple[float, float] | None = None,
) -> Comparison:
    """
    Compare runs against the first one.

    Args:
        results: At least two runs, in memory or loaded with :meth:`RunTable.from_dir`.
        names: Labels for in-memory results; defaults to run0, run1, ...
        since: State distances are reported as zero before this time in the
            ``max_state_delta`` metric.
        terminal_window: Interval for the terminal measures; the last quarter of the
            common grid by default.

    Returns:
        The Comparison.

    Raises:
        ValueError: With fewer than two runs or state dimensions that differ.
    """
    if len(results) < 2:
        raise ValueError("compare needs at least two runs")
    names = list(names) if names is not None else [f"run{i}" for i in range(len(results))]
    tables = [
        r if isinstance(r, RunTable) else RunTable.from_result(r, name)
        for r, name in zip(results, names)
    ]
    if len({t.name for t in tables}) < len(tables):
        tables = [RunTable(f"{t.name}_{i}", t.frame, t.theta_true) for i, t in enumerate(tables)]
    if len({len(t.columns("x")) for t in tables}) != 1:
        raise ValueError("runs have different state dimensions")

    grid = _common_grid(tables)
    tables = [_resample(t, grid) for t in tables]
    if terminal_window is None:
        span = grid[-1] - grid[0]
        terminal_window = (grid[-1] - TERMINAL_FRACTION * span, grid[-1])
    terminal = (grid >= terminal_window[0]) & (grid <= terminal_window[1])
    after = grid >= since

    ref = tables[0]
    table = pd.DataFrame({"t": grid})
    rows = []
    for run in tables:
        norms = np.linalg.norm(run.state(), axis=1)
        err = run.theta_error()
        table[f"theta_err_{run.name}"] = err
        row = {
            "run": run.name,
            "overshoot": float(norms.max() / max(norms[0], np.finfo(float).tiny)),
            "sup_norm_x": float(norms.max()),
            "terminal_norm_x": float(norms[terminal].max()),
            "terminal_theta_error": float(err[terminal].max()),
            "max_state_delta": 0.0,
        }
        if run is not ref:
            delta = np.linalg.norm(run.state() - ref.state(), axis=1)
            table[f"x_delta_{run.name}"] = delta
            row["max_state_delta"] = float(delta[after].max()) if after.any() else 0.0
        rows.append(row)
    return Comparison(table=table, metrics=pd.DataFrame(rows).set_index("run"))


def write_comparison(comparison: Comparison, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    comparison.table.to_csv(
        out / "comparison.csv", index=False, float_format="%.17g", lineterminator="\n"
    )
    comparison.metrics.to_csv(out / "metrics.csv", float_format="%.17g", lineterminator="\n")
