"""Tests for run output, comparison and the command line."""

import json
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest
import yaml

from regtrig.cli import EXIT_CONFIG, EXIT_OK, EXIT_SCENARIO, main
from regtrig.core.presets import get_preset, unregister_preset
from regtrig.core.yaml_parser import load_config
from regtrig.harness.compare import RunTable, compare, write_comparison
from regtrig.harness.emit import build_sampling_grid, emit, events_frame, sample_trajectory
from regtrig.harness.runner import run_batch, run_scenario
from regtrig.harness.selftest import run_selftest


@pytest.fixture(scope="module")
def short_run():
    cfg = replace(get_preset("fig4"), name="fig4_short", t_end=2.0)
    return cfg, run_scenario(cfg)


def test_sampling_grid():
    """Fine steps up to 0.1, coarse steps after, ending exactly at t_end."""
    grid = build_sampling_grid(20.0)
    assert grid[0] == 0.0
    assert grid[-1] == 20.0
    assert np.all(np.diff(grid) > 0.0)
    np.testing.assert_allclose(np.diff(grid[grid <= 0.1]), 0.001, atol=1e-12)
    np.testing.assert_allclose(np.diff(grid[grid >= 0.1]), 0.01, atol=1e-9)
    short = build_sampling_grid(0.0125)
    assert short[-1] == 0.0125


def test_sample_trajectory_columns(short_run):
    """Trajectory table carries state, input, estimate and V."""
    _, result = short_run
    frame = sample_trajectory(result)
    assert list(frame.columns) == ["t", "x1", "x2", "u1", "th1", "V"]
    assert frame["th1"].iloc[0] == -4.0
    assert frame["th1"].iloc[-1] == pytest.approx(1.0)
    np.testing.assert_allclose(frame[["x1", "x2"]].iloc[0], [1.0, 1.0])


def test_events_frame(short_run):
    """One row per event with the estimate before and after."""
    _, result = short_run
    frame = events_frame(result)
    assert len(frame) == result.summary.event_count
    assert frame["cause"].iloc[0] == "GuardCrossed"
    assert frame["th_before1"].iloc[0] == -4.0
    assert frame["th_after1"].iloc[0] == pytest.approx(1.0)


def test_emit_writes_files(short_run, tmp_path):
    """emit writes trajectory, events, summary and the config echo."""
    cfg, result = short_run
    written = emit(result, cfg, tmp_path / "out")
    names = sorted(p.name for p in written)
    assert names == ["config.yaml", "events.csv", "summary.json", "trajectory.csv"]

    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["name"] == "fig4_short"
    assert summary["event_count"] == result.summary.event_count
    assert 0.01 <= summary["first_event_time"] <= 0.04

    trajectory = pd.read_csv(tmp_path / "out" / "trajectory.csv")
    assert trajectory["t"].iloc[-1] == 2.0
    assert load_config(tmp_path / "out" / "config.yaml") == cfg


def test_compare_identical_runs(short_run):
    """A run compared with itself has zero state distance."""
    _, result = short_run
    comparison = compare([result, result], names=["a", "a"])
    assert list(comparison.metrics.index) == ["a_0", "a_1"]
    assert comparison.metrics["max_state_delta"].max() == 0.0
    assert "theta_err_a_0" in comparison.table.columns


def test_compare_needs_two_runs(short_run):
    """A single run cannot be compared."""
    _, result = short_run
    with pytest.raises(ValueError, match="at least two"):
        compare([result])


def test_compare_from_directories(short_run, tmp_path):
    """Runs written by emit can be compared from disk."""
    cfg, result = short_run
    emit(result, cfg, tmp_path / "a")
    nominal_cfg = replace(get_preset("fig1"), name="fig1_short", t_end=2.0)
    emit(run_scenario(nominal_cfg), nominal_cfg, tmp_path / "b")

    tables = [RunTable.from_dir(tmp_path / "a"), RunTable.from_dir(tmp_path / "b")]
    comparison = compare(tables)
    assert list(comparison.metrics.index) == ["fig4_short", "fig1_short"]
    assert comparison.metrics.loc["fig1_short", "max_state_delta"] > 0.0

    write_comparison(comparison, tmp_path / "cmp")
    assert (tmp_path / "cmp" / "comparison.csv").is_file()
    assert (tmp_path / "cmp" / "metrics.csv").is_file()


def test_run_batch_serial(tmp_path):
    """Batch runs land in one directory per scenario."""
    sources = [
        replace(get_preset("lti_scalar"), t_end=1.0),
        replace(get_preset("fig1"), name="fig1_short", t_end=1.0),
    ]
    written = run_batch(sources, tmp_path)
    assert set(written) == {"lti_scalar", "fig1_short"}
    for path in written.values():
        assert (path / "summary.json").is_file()


def test_cli_run_and_compare(tmp_path, capsys):
    """run writes a directory; compare prints the metrics table."""
    scenario = tmp_path / "short.yaml"
    scenario.write_text(yaml.safe_dump({"base": "lti_scalar", "name": "lti_short", "t_end": 2.0}))
    assert main(["-q", "run", str(scenario), "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["-q", "run", "lti_scalar", "--out", str(tmp_path / "b")]) == EXIT_OK
    assert (tmp_path / "a" / "trajectory.csv").is_file()

    capsys.readouterr()
    dirs = [str(tmp_path / "a"), str(tmp_path / "b")]
    assert main(["-q", "compare", *dirs, "--out", str(tmp_path / "c")]) == EXIT_OK
    assert "max_state_delta" in capsys.readouterr().out
    assert (tmp_path / "c" / "metrics.csv").is_file()


def test_cli_list_presets_and_sample_config(tmp_path, capsys):
    """list-presets names every preset; sample-config writes a loadable file."""
    assert main(["list-presets"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "fig4" in out and "lti_scalar" in out

    path = tmp_path / "sample.yaml"
    assert main(["sample-config", str(path)]) == EXIT_OK
    assert load_config(path).name == "my_scenario"


def test_cli_config_errors(tmp_path):
    """Unknown scenarios and invalid files exit with the configuration code."""
    assert main(["-q", "run", "no_such_preset"]) == EXIT_CONFIG
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump({"base": "fig4", "T": -1.0}))
    assert main(["-q", "run", str(bad)]) == EXIT_CONFIG


def test_cli_simulation_failure(tmp_path):
    """A run that exceeds its event budget exits with the simulation code."""
    path = tmp_path / "budget.yaml"
    path.write_text(yaml.safe_dump({"base": "fig4", "max_events": 1}))
    assert main(["-q", "run", str(path), "--out", str(tmp_path / "out")]) == EXIT_SCENARIO


def test_cli_usage_errors_exit_with_config_code(capsys):
    """A missing command or an unknown flag is a usage error, not a simulation failure."""
    for argv in ([], ["--bogus"], ["run"]):
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == EXIT_CONFIG
    assert "usage: regtrig" in capsys.readouterr().err


def test_cli_runs_discovered_scenario(tmp_path, monkeypatch):
    """A scenario defined only in ./regtrig.yaml can be run by name."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    scenarios = {"scenarios": [{"base": "lti_scalar", "name": "lti_local", "t_end": 1.0}]}
    (tmp_path / "regtrig.yaml").write_text(yaml.safe_dump(scenarios))
    try:
        assert main(["-q", "run", "lti_local", "--out", str(tmp_path / "out")]) == EXIT_OK
    finally:
        unregister_preset("lti_local")
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["name"] == "lti_local"
    assert summary["t_end"] == 1.0


def test_cli_list_systems(capsys):
    """list-systems prints every catalog plant with its description."""
    assert main(["list-systems"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("planar_s5", "disturbed_s6", "lti_custom"):
        assert name in out


def test_emit_is_byte_identical_across_runs(tmp_path):
    """Running and emitting the same scenario twice writes the same bytes."""
    cfg = replace(get_preset("lti_scalar"), t_end=2.0)
    for out in ("a", "b"):
        emit(run_scenario(cfg), cfg, tmp_path / out)
    for name in ("trajectory.csv", "events.csv", "summary.json", "config.yaml"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.slow
def test_selftest_passes():
    """The built-in acceptance checks all pass."""
    results = run_selftest()
    failed = [r for r in results if not r.passed]
    assert not failed, failed
    assert main(["-q", "selftest"]) == EXIT_OK
