"""CSV and JSON output of runs."""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from regtrig.control.closed_loop import RunResult
from regtrig.core.presets import ScenarioConfig
from regtrig.core.yaml_parser import dump_config

logger = logging.getLogger(__name__)

FINE_DT = 0.001
FINE_UNTIL = 0.1
COARSE_DT = 0.01
FLOAT_FORMAT = "%.17g"


def build_sampling_grid(t_end: float) -> np.ndarray:
    """Steps of 0.001 up to t = 0.1, then 0.01, always ending at t_end."""
    fine_count = int(round(min(FINE_UNTIL, t_end) / FINE_DT))
    grid = [np.arange(fine_count + 1) * FINE_DT]
    if t_end > FINE_UNTIL:
        coarse_count = int(np.floor((t_end - FINE_UNTIL) / COARSE_DT + 1e-9))
        grid.append(FINE_UNTIL + np.arange(1, coarse_count + 1) * COARSE_DT)
    times = np.concatenate(grid)
    times = times[times <= t_end]
    if times[-1] < t_end - 1e-12:
        times = np.append(times, t_end)
    return times


def _columns(prefix: str, count: int) -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(count)]


def sample_trajectory(result: RunResult, times: np.ndarray | None = None) -> pd.DataFrame:
    """Trajectory table with columns t, x1..xn, u1..um, th1..thl, V."""
    times = build_sampling_grid(result.t_end) if times is None else times
    data = result.sample(times)
    frame = pd.DataFrame({"t": data["t"]})
    for name, block in (("x", data["x"]), ("u", data["u"]), ("th", data["theta_hat"])):
        for col, values in zip(_columns(name, block.shape[1]), block.T):
            frame[col] = values
    frame["V"] = data["V"]
    return frame


def events_frame(result: RunResult) -> pd.DataFrame:
    """One row per event after the initial one."""
    rows = []
    for ev in result.events[1:]:
        row = {"i": ev.index, "tau": ev.tau, "cause": ev.cause.value, "mu": ev.mu}
        for col, value in zip(_columns("th_before", result.l), ev.theta_before):
            row[col] = value
        for col, value in zip(_columns("th_after", result.l), ev.theta_hat):
            row[col] = value
        report = ev.report
        row["rank"] = report.rank if report else None
        row["residual"] = report.residual if report else None
        row["skipped"] = report.skipped if report else None
        rows.append(row)
    columns = (
        ["i", "tau", "cause", "mu"]
        + _columns("th_before", result.l)
        + _columns("th_after", result.l)
        + ["rank", "residual", "skipped"]
    )
    return pd.DataFrame(rows, columns=columns)


def summary_dict(result: RunResult, cfg: ScenarioConfig) -> dict:
    return {
        "name": cfg.name,
        "system": cfg.system,
        "mode": result.mode,
        "theta_true": list(cfg.theta_true),
        "t_end": cfg.t_end,
        **result.summary.to_dict(),
    }


def emit(
    result: RunResult,
    cfg: ScenarioConfig,
    out_dir: str | Path,
    formats: tuple[str, ...] = ("csv", "json"),
) -> list[Path]:
    """
    Write a run to ``out_dir``.

    Files: trajectory.csv and events.csv (``csv``), summary.json (``json``) and
    config.yaml, an echo of the scenario that ``load_config`` reads back.

    Returns:
        Paths written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    if "csv" in formats:
        for name, frame in (
            ("trajectory.csv", sample_trajectory(result)),
            ("events.csv", events_frame(result)),
        ):
            path = out / name
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
            written.append(path)

    if "json" in formats:
        path = out / "summary.json"
        path.write_text(json.dumps(summary_dict(result, cfg), indent=2) + "\n")
        written.append(path)

    path = out / "config.yaml"
    dump_config(cfg, path)
    written.append(path)
    logger.info("wrote %d files to %s", len(written), out)
    return written
