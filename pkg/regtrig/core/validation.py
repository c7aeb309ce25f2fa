"""Validation of scenario mappings before a ScenarioConfig is built."""

import math
from dataclasses import dataclass
from typing import Any

from regtrig.core.presets import (
    COMPARATORS,
    IDENTIFIER_VARIANTS,
    REQUIRED_KEYS,
    UPDATE_POLICIES,
    ScenarioConfig,
)

_POSITIVE = ("T", "t_end", "a_scale", "rel_tol", "abs_tol", "max_step", "event_tol", "gamma")
_NON_NEGATIVE = ("eps", "A1", "A2", "dead_zone")
_LTI_KEYS = {"A", "B", "C", "K0", "K", "M", "a"}
_PLANT_DIMENSIONS = {"planar_s5": (2, 2), "disturbed_s6": (2, 1)}


@dataclass
class ValidationError:
    """
    A validation error or warning.

    Attributes:
        field: The key that failed validation.
        message: Human-readable error message.
        severity: 'error' or 'warning'.
    """

    field: str
    message: str
    severity: str = "error"


def _is_number(value: Any) -> bool:
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and math.isfinite(float(value))
    )


def _is_vector(value: Any) -> bool:
    return isinstance(value, (list, tuple)) and len(value) > 0 and all(_is_number(v) for v in value)


def validate_scenario_data(data: dict[str, Any]) -> list[ValidationError]:
    """
    Validate a scenario mapping.

    Args:
        data: Mapping of scenario keys, as read from YAML.

    Returns:
        List of validation errors and warnings. Empty list if valid.
    """
    from regtrig.systems.catalog import get_system, list_systems

    errors: list[ValidationError] = []
    known = set(ScenarioConfig.keys())

    for key in data:
        if key not in known:
            errors.append(ValidationError(field=str(key), message="Unknown key."))
    for key in REQUIRED_KEYS:
        if key not in data:
            errors.append(ValidationError(field=key, message="Missing required key."))

    system = data.get("system")
    if "system" in data and system not in list_systems():
        errors.append(
            ValidationError(
                field="system", message=f"Unknown system '{system}'. Available: {list_systems()}"
            )
        )

    for key in ("theta_true", "theta_hat0", "x0"):
        if key in data and not _is_vector(data[key]):
            errors.append(
                ValidationError(field=key, message="Must be a non-empty list of finite numbers.")
            )

    for key in _POSITIVE:
        if key in data and not (_is_number(data[key]) and data[key] > 0):
            errors.append(ValidationError(field=key, message="Must be a number > 0."))
    for key in _NON_NEGATIVE:
        if key in data and data[key] is not None and not (_is_number(data[key]) and data[key] >= 0):
            errors.append(ValidationError(field=key, message="Must be a number >= 0."))
    for key in ("rank_tol", "tikhonov_eta"):
        if key in data and not (_is_number(data[key]) and data[key] > 0):
            errors.append(ValidationError(field=key, message="Must be a number > 0."))

    for key in ("N_tilde", "max_events"):
        if key in data and not (
            isinstance(data[key], int) and not isinstance(data[key], bool) and data[key] >= 1
        ):
            errors.append(ValidationError(field=key, message="Must be an integer >= 1."))

    if (
        _is_number(data.get("event_tol"))
        and _is_number(data.get("max_step"))
        and data["event_tol"] > data["max_step"]
    ):
        errors.append(ValidationError(field="event_tol", message="Must not exceed max_step."))

    for key, allowed in (
        ("identifier", IDENTIFIER_VARIANTS),
        ("comparator", COMPARATORS),
        ("update_policy", UPDATE_POLICIES),
    ):
        if key in data and data[key] not in allowed:
            errors.append(
                ValidationError(field=key, message=f"Must be one of {list(allowed)}.")
            )

    if "name" in data and not (isinstance(data["name"], str) and data["name"]):
        errors.append(ValidationError(field="name", message="Must be a non-empty string."))

    if _is_vector(data.get("theta_true")) and _is_vector(data.get("theta_hat0")):
        if len(data["theta_true"]) != len(data["theta_hat0"]):
            errors.append(
                ValidationError(
                    field="theta_hat0", message="Must have the same length as theta_true."
                )
            )

    if system in _PLANT_DIMENSIONS:
        n, l = _PLANT_DIMENSIONS[system]
        if _is_vector(data.get("x0")) and len(data["x0"]) != n:
            errors.append(
                ValidationError(field="x0", message=f"System '{system}' needs {n} states.")
            )
        if _is_vector(data.get("theta_true")) and len(data["theta_true"]) != l:
            errors.append(
                ValidationError(
                    field="theta_true", message=f"System '{system}' has {l} parameter(s)."
                )
            )

    if system != "disturbed_s6":
        for key in ("A1", "A2"):
            if _is_number(data.get(key)) and data[key] != 0:
                errors.append(
                    ValidationError(
                        field=key, message="Disturbances only act on system 'disturbed_s6'."
                    )
                )
        if data.get("comparator") == "extended_matching":
            errors.append(
                ValidationError(
                    field="comparator",
                    message="The continuous comparator exists only for 'disturbed_s6'.",
                )
            )

    if data.get("identifier") == "explicit_scalar":
        if system != "disturbed_s6":
            errors.append(
                ValidationError(
                    field="identifier", message="'explicit_scalar' requires system 'disturbed_s6'."
                )
            )
        if all(_is_number(data.get(k)) for k in ("t_end", "T", "N_tilde")) and (
            data["t_end"] > data["N_tilde"] * data["T"]
        ):
            errors.append(
                ValidationError(
                    field="t_end",
                    message="'explicit_scalar' needs windows starting at 0: t_end <= N_tilde * T.",
                )
            )

    lti = data.get("lti")
    if lti is not None:
        if system != "lti_custom":
            errors.append(ValidationError(field="lti", message="Only valid for 'lti_custom'."))
        elif not isinstance(lti, dict):
            errors.append(ValidationError(field="lti", message="Must be a mapping."))
        else:
            missing = {"A", "B", "C", "K0", "K"} - set(lti)
            unknown = set(lti) - _LTI_KEYS
            if missing:
                errors.append(
                    ValidationError(field="lti", message=f"Missing keys: {sorted(missing)}.")
                )
            if unknown:
                errors.append(
                    ValidationError(field="lti", message=f"Unknown keys: {sorted(unknown)}.")
                )

    if not any(e.severity == "error" for e in errors) and system in _PLANT_DIMENSIONS:
        entry = get_system(system)
        if data.get("comparator", "none") == "none" and data["N_tilde"] <= entry.N_h3:
            errors.append(
                ValidationError(
                    field="N_tilde",
                    message=f"N_tilde <= {entry.N_h3}: exact identification is not guaranteed.",
                    severity="warning",
                )
            )

    return errors
