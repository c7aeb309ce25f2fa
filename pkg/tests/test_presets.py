"""Tests for presets module."""

from dataclasses import replace

import pytest

from regtrig.core.presets import (
    FIGURE_GROUPS,
    ScenarioConfig,
    get_preset,
    list_presets,
    register_preset,
    unregister_preset,
)


def test_fig4_preset():
    """Test the undisturbed event-triggered scenario."""
    fig4 = get_preset("fig4")
    assert fig4.system == "disturbed_s6"
    assert fig4.theta_true == (1.0,)
    assert fig4.theta_hat0 == (-4.0,)
    assert fig4.x0 == (1.0, 1.0)
    assert fig4.T == 3.0
    assert fig4.N_tilde == 7
    assert fig4.t_end == 20.0
    assert fig4.eps == 1e-6
    assert fig4.a_scale == pytest.approx(1.0 / 20.0)
    assert fig4.A1 == 0.0 and fig4.A2 == 0.0
    assert fig4.comparator == "none"
    assert fig4.update_policy == "min_norm"


def test_figure_groups_share_disturbances():
    """Every figure of a group carries the group's amplitudes and comparator."""
    for (a1, a2), runs in FIGURE_GROUPS.items():
        for comparator, names in runs.items():
            for name in names:
                cfg = get_preset(name)
                assert (cfg.A1, cfg.A2) == (a1, a2)
                assert cfg.comparator == comparator


def test_extra_presets():
    """Test the explicit-block, planar and linear presets."""
    explicit = get_preset("fig4_explicit")
    assert explicit.identifier == "explicit_scalar"
    assert explicit.update_policy == "dead_zone"
    assert explicit.gate == explicit.eps
    assert explicit.t_end <= explicit.N_tilde * explicit.T

    assert get_preset("planar_s5").theta_true == (0.5, -0.3)
    assert get_preset("lti_scalar").system == "lti_custom"


def test_get_preset_invalid():
    """Test getting preset with invalid name."""
    with pytest.raises(ValueError, match="Unknown preset"):
        get_preset("invalid")


def test_list_presets():
    """Test listing available presets."""
    presets = list_presets()
    for i in range(1, 21):
        assert f"fig{i}" in presets
    assert len(presets) >= 23


def test_register_and_unregister_preset():
    """Test the registry round trip and built-in protection."""
    custom = replace(get_preset("fig4"), name="fig4_short", t_end=1.0)
    register_preset(custom)
    try:
        assert get_preset("fig4_short").t_end == 1.0
        with pytest.raises(ValueError, match="already exists"):
            register_preset(custom)
    finally:
        unregister_preset("fig4_short")
    with pytest.raises(ValueError, match="not found"):
        unregister_preset("fig4_short")
    with pytest.raises(ValueError, match="Cannot unregister built-in"):
        unregister_preset("fig4")


def test_scenario_config_dict_round_trip():
    """to_dict gives lists and from_dict rebuilds the same config."""
    cfg = get_preset("fig10")
    data = cfg.to_dict()
    assert data["x0"] == [1.0, 1.0]
    assert "dead_zone" not in data
    assert ScenarioConfig.from_dict(data) == cfg


def test_integrator_config_from_scenario():
    """Integrator tolerances are taken from the scenario."""
    cfg = replace(get_preset("fig4"), rel_tol=1e-8, max_step=0.05)
    integrator = cfg.integrator_config()
    assert integrator.rel_tol == 1e-8
    assert integrator.max_step == 0.05
    assert replace(cfg, dead_zone=1e-3).gate == 1e-3
