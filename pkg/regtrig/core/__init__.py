"""Scenario configuration, presets and validation."""

from regtrig.core.config_discovery import discover_scenario_files, load_discovered_scenarios
from regtrig.core.presets import (
    FIGURE_GROUPS,
    ScenarioConfig,
    get_preset,
    list_presets,
    register_preset,
    unregister_preset,
)
from regtrig.core.validation import ValidationError, validate_scenario_data
from regtrig.core.yaml_parser import (
    ConfigParseError,
    ConfigValidationError,
    config_from_dict,
    create_sample_scenario_yaml,
    dump_config,
    load_config,
    load_scenarios_from_yaml,
)

__all__ = [
    "FIGURE_GROUPS",
    "ConfigParseError",
    "ConfigValidationError",
    "ScenarioConfig",
    "ValidationError",
    "config_from_dict",
    "create_sample_scenario_yaml",
    "discover_scenario_files",
    "dump_config",
    "get_preset",
    "list_presets",
    "load_config",
    "load_discovered_scenarios",
    "load_scenarios_from_yaml",
    "register_preset",
    "unregister_preset",
    "validate_scenario_data",
]
