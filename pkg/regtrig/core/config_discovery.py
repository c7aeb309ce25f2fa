"""Discovery of user scenario files."""

import logging
from pathlib import Path

from regtrig.core.presets import list_presets, register_preset
from regtrig.core.yaml_parser import (
    ConfigParseError,
    ConfigValidationError,
    load_config,
    load_scenarios_from_yaml,
)

logger = logging.getLogger(__name__)


def get_config_dir() -> Path:
    """
    Get the user configuration directory for regtrig.

    Returns:
        ~/.config/regtrig when ~/.config exists, otherwise ~/.regtrig.
    """
    config_home = Path.home() / ".config" / "regtrig"
    if config_home.exists() or config_home.parent.exists():
        return config_home
    return Path.home() / ".regtrig"


def discover_scenario_files() -> list[Path]:
    """
    Discover scenario files from standard locations.

    Locations are checked in order of precedence (highest first):
    1. ./regtrig.yaml
    2. ./.regtrig/scenarios.yaml
    3. ~/.config/regtrig/scenarios.yaml
    4. ~/.regtrig.yaml

    Returns:
        Existing files, in order of precedence.
    """
    cwd = Path.cwd()
    candidates = [
        cwd / "regtrig.yaml",
        cwd / ".regtrig" / "scenarios.yaml",
        get_config_dir() / "scenarios.yaml",
        Path.home() / ".regtrig.yaml",
    ]
    return [path for path in candidates if path.is_file()]


def load_discovered_scenarios() -> list[str]:
    """
    Register every scenario found by :func:`discover_scenario_files`.

    Names already registered, by a built-in or a file of higher precedence, are
    skipped. Files that fail to load are logged and ignored.

    Returns:
        Names of the newly registered scenarios.
    """
    registered = []
    for path in discover_scenario_files():
        try:
            try:
                configs = load_scenarios_from_yaml(path)
            except ConfigParseError:
                configs = [load_config(path)]
        except (ConfigParseError, ConfigValidationError, OSError) as exc:
            logger.warning("skipping scenario file %s: %s", path, exc)
            continue
        for config in configs:
            if config.name in list_presets():
                logger.debug("scenario '%s' from %s already registered", config.name, path)
                continue
            register_preset(config)
            registered.append(config.name)
    return registered
