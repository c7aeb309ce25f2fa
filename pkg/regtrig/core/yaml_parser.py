"""YAML loading and echoing of scenario configurations."""

import logging
from pathlib import Path
from typing import Any

import yaml

from regtrig.core.presets import ScenarioConfig, get_preset, list_presets
from regtrig.core.validation import ValidationError, validate_scenario_data

logger = logging.getLogger(__name__)


class ConfigParseError(Exception):
    """Exception raised when a scenario file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class ConfigValidationError(Exception):
    """Exception raised when a scenario mapping is invalid."""

    def __init__(self, errors: list[ValidationError]) -> None:
        self.errors = errors
        messages = [f"{e.field}: {e.message}" for e in errors]
        super().__init__("\n".join(messages))


def _read_yaml(path: Path) -> Any:
    try:
        with open(path, "r") as f:
            return yaml.safe_load(f)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigParseError(f"{path}: {problem}", line=line) from exc


def config_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    """
    Validate a mapping and build the ScenarioConfig.

    A ``base`` key names a registered preset whose values are used for every key
    the mapping does not set.

    Raises:
        ConfigValidationError: If any error-level problem is found.
    """
    data = dict(data)
    base = data.pop("base", None)
    if base is not None:
        if base not in list_presets():
            raise ConfigValidationError(
                [ValidationError(field="base", message=f"Unknown preset '{base}'.")]
            )
        data = {**get_preset(base).to_dict(), **data}

    problems = validate_scenario_data(data)
    for warning in (e for e in problems if e.severity == "warning"):
        logger.warning("%s: %s", warning.field, warning.message)
    errors = [e for e in problems if e.severity == "error"]
    if errors:
        raise ConfigValidationError(errors)
    return ScenarioConfig.from_dict(data)


def load_config(source: str | Path) -> ScenarioConfig:
    """
    Load a scenario from a YAML file or by preset name.

    Args:
        source: Path to a YAML scenario file, or the name of a registered preset.

    Returns:
        The validated ScenarioConfig.

    Raises:
        FileNotFoundError: If ``source`` is neither a file nor a preset name.
        ConfigParseError: If the YAML is malformed.
        ConfigValidationError: If the scenario is invalid.

    Example:
        >>> load_config("fig10").A1
        2.0
    """
    path = Path(source)
    if not path.exists():
        if str(source) in list_presets():
            return get_preset(str(source))
        raise FileNotFoundError(f"Scenario file or preset not found: {source}")

    data = _read_yaml(path)
    if data is None:
        raise ConfigParseError(f"YAML file is empty: {source}")
    if not isinstance(data, dict):
        raise ConfigParseError(f"{source}: top level must be a mapping of keys")
    if "scenarios" in data:
        scenarios = load_scenarios_from_yaml(path)
        if not scenarios:
            raise ConfigParseError(f"No scenarios found in file: {source}")
        return scenarios[0]
    return config_from_dict(data)


def load_scenarios_from_yaml(file_path: str | Path) -> list[ScenarioConfig]:
    """
    Load every scenario of a file with a top-level ``scenarios:`` list.

    Raises:
        ConfigParseError: If the file is malformed or entries are not mappings.
        ConfigValidationError: If a scenario is invalid.
    """
    path = Path(file_path)
    data = _read_yaml(path)
    if not isinstance(data, dict) or not isinstance(data.get("scenarios"), list):
        raise ConfigParseError(f"{file_path}: expected a 'scenarios' list")
    configs = []
    for i, entry in enumerate(data["scenarios"]):
        if not isinstance(entry, dict):
            raise ConfigParseError(f"{file_path}: scenario #{i} is not a mapping")
        configs.append(config_from_dict(entry))
    return configs


def dump_config(config: ScenarioConfig, file_path: str | Path) -> None:
    """Write ``config`` as a flat YAML mapping that :func:`load_config` reads back."""
    with open(file_path, "w") as f:
        yaml.safe_dump(config.to_dict(), f, sort_keys=False, default_flow_style=None)


def create_sample_scenario_yaml(file_path: str | Path) -> None:
    """
    Write a commented sample scenario file.

    Args:
        file_path: Path where the sample file will be written.
    """
    sample = """# Sample regtrig scenario
# Run with: regtrig run this-file.yaml --out results/

# Start from a registered preset and override some keys (optional)
# base: fig4

name: my_scenario
system: disturbed_s6        # planar_s5 | disturbed_s6 | lti_custom

theta_true: [1.0]           # parameter used to simulate the plant
theta_hat0: [-4.0]          # initial estimate
x0: [1.0, 1.0]

T: 3.0                      # longest time between events
N_tilde: 7                  # window length in multiples of T
t_end: 20.0

a_scale: 0.05               # trigger offset a(x) = a_scale * |x|^2
eps: 1.0e-6                 # constant added to the trigger threshold
A1: 0.0                     # v1 = A1 sin(2t), parameter disturbance
A2: 0.0                     # v2 = A2 sin(2t), additive disturbance

identifier: double          # double | single | explicit_scalar
comparator: none            # none | nominal | extended_matching
gamma: 5.0                  # gain of the extended_matching comparator
update_policy: min_norm     # min_norm | tikhonov | dead_zone
rank_tol: 1.0e-12

rel_tol: 1.0e-9
abs_tol: 1.0e-12
max_step: 0.1
event_tol: 1.0e-9

# Linear plants (system: lti_custom), K(theta) = K0 + sum_j theta_j K[j]
# lti:
#   A: [[0.0]]
#   B: [[1.0]]
#   C: [[[1.0]]]
#   K0: [[-1.0]]
#   K: [[[-1.0]]]
#   M: 1.0
#   a: 1.0
"""
    Path(file_path).write_text(sample)
