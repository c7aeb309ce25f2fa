"""Tests for YAML scenario loading, validation and discovery."""

import pytest
import yaml

from regtrig.core.config_discovery import discover_scenario_files, load_discovered_scenarios
from regtrig.core.presets import get_preset, list_presets, unregister_preset
from regtrig.core.validation import validate_scenario_data
from regtrig.core.yaml_parser import (
    ConfigParseError,
    ConfigValidationError,
    config_from_dict,
    create_sample_scenario_yaml,
    dump_config,
    load_config,
    load_scenarios_from_yaml,
)


def _write(path, data):
    path.write_text(yaml.safe_dump(data))
    return path


def test_dump_and_load_round_trip(tmp_path):
    """A dumped preset loads back identical."""
    cfg = get_preset("fig17")
    path = tmp_path / "fig17.yaml"
    dump_config(cfg, path)
    assert load_config(path) == cfg


def test_load_config_by_preset_name():
    """A source that is not a file is looked up in the registry."""
    assert load_config("fig4") == get_preset("fig4")
    with pytest.raises(FileNotFoundError):
        load_config("no_such_scenario")


def test_missing_required_key(tmp_path):
    """A scenario without t_end is rejected with a field-level error."""
    data = get_preset("fig4").to_dict()
    del data["t_end"]
    with pytest.raises(ConfigValidationError) as excinfo:
        load_config(_write(tmp_path / "s.yaml", data))
    assert [e.field for e in excinfo.value.errors] == ["t_end"]


def test_unknown_key_rejected():
    """Typos are errors, not silently ignored."""
    data = {**get_preset("fig4").to_dict(), "t_ned": 5.0}
    with pytest.raises(ConfigValidationError, match="t_ned: Unknown key"):
        config_from_dict(data)


def test_parse_error_reports_line(tmp_path):
    """Malformed YAML raises ConfigParseError with the offending line."""
    path = tmp_path / "bad.yaml"
    path.write_text("system: disturbed_s6\nx0: [1.0, 1.0\nT: 3.0\n")
    with pytest.raises(ConfigParseError) as excinfo:
        load_config(path)
    assert excinfo.value.line is not None


def test_empty_and_non_mapping_files(tmp_path):
    """Empty files and top-level lists are parse errors."""
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    with pytest.raises(ConfigParseError, match="empty"):
        load_config(empty)
    listed = tmp_path / "list.yaml"
    listed.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigParseError, match="mapping"):
        load_config(listed)


def test_base_preset_override():
    """A base preset supplies every key the mapping leaves out."""
    cfg = config_from_dict({"base": "fig4", "name": "short", "t_end": 2.0})
    assert cfg.t_end == 2.0
    assert cfg.theta_hat0 == (-4.0,)
    assert cfg.name == "short"
    with pytest.raises(ConfigValidationError, match="Unknown preset"):
        config_from_dict({"base": "nope"})


def test_validation_rules():
    """Representative value, dimension and cross-field checks."""
    base = get_preset("fig4").to_dict()

    def fields(**overrides):
        problems = validate_scenario_data({**base, **overrides})
        return {e.field for e in problems if e.severity == "error"}

    assert fields() == set()
    assert "T" in fields(T=0.0)
    assert "N_tilde" in fields(N_tilde=2.5)
    assert "x0" in fields(x0=[1.0])
    assert "theta_hat0" in fields(theta_hat0=[1.0, 2.0])
    assert "comparator" in fields(comparator="bogus")
    assert "event_tol" in fields(event_tol=1.0)
    assert "system" in fields(system="nope")
    planar = {"system": "planar_s5", "x0": [1.0, 0.0], "theta_true": [0.1, 0.2]}
    assert "A1" in fields(**planar, theta_hat0=[0.0, 0.0], A1=1.0)
    assert "t_end" in fields(identifier="explicit_scalar", t_end=30.0)
    assert "lti" in fields(lti={"A": [[0.0]]})


def test_short_window_warning():
    """N_tilde at or below the identification horizon only warns."""
    problems = validate_scenario_data({**get_preset("fig4").to_dict(), "N_tilde": 1})
    assert [(e.field, e.severity) for e in problems] == [("N_tilde", "warning")]


def test_lti_scenario(tmp_path):
    """A custom linear plant is described inline."""
    data = {
        "name": "lti_double",
        "system": "lti_custom",
        "theta_true": [1.5],
        "theta_hat0": [0.0],
        "x0": [1.0],
        "T": 1.0,
        "N_tilde": 2,
        "t_end": 3.0,
        "lti": {"A": [[0.0]], "B": [[1.0]], "C": [[[1.0]]], "K0": [[-2.0]], "K": [[[-1.0]]]},
    }
    cfg = load_config(_write(tmp_path / "lti.yaml", data))
    assert cfg.lti["K0"] == [[-2.0]]


def test_scenarios_list_file(tmp_path):
    """A file with a scenarios list yields several configs."""
    data = {"scenarios": [{"base": "fig4", "name": "a"}, {"base": "fig17", "name": "b"}]}
    path = _write(tmp_path / "many.yaml", data)
    configs = load_scenarios_from_yaml(path)
    assert [c.name for c in configs] == ["a", "b"]
    assert load_config(path).name == "a"


def test_sample_config_is_loadable(tmp_path):
    """The annotated sample file is a valid scenario."""
    path = tmp_path / "sample.yaml"
    create_sample_scenario_yaml(path)
    cfg = load_config(path)
    assert cfg.name == "my_scenario"
    assert cfg.system == "disturbed_s6"


def test_discovery_registers_local_file(tmp_path, monkeypatch):
    """./regtrig.yaml is discovered and its scenarios registered."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    _write(tmp_path / "regtrig.yaml", {"scenarios": [{"base": "fig4", "name": "local_fig4"}]})
    assert discover_scenario_files() == [tmp_path / "regtrig.yaml"]
    try:
        assert load_discovered_scenarios() == ["local_fig4"]
        assert "local_fig4" in list_presets()
        assert load_discovered_scenarios() == []
    finally:
        unregister_preset("local_fig4")


def test_discovery_skips_broken_file(tmp_path, monkeypatch, caplog):
    """An invalid discovered file is logged and ignored."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    (tmp_path / "regtrig.yaml").write_text("system: [unclosed\n")
    with caplog.at_level("WARNING", logger="regtrig.core.config_discovery"):
        assert load_discovered_scenarios() == []
    assert "skipping scenario file" in caplog.text
