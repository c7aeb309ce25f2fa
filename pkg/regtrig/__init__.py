"""
regtrig: regulation-triggered adaptive control with batch least-squares identification.

The controller runs a nominal feedback law on a piecewise-constant parameter
estimate. The estimate is replaced only at events fired by a Lyapunov-based
regulation trigger, using a Gram system accumulated over a sliding window of
past events.
"""

__version__ = "0.1.0"
__license__ = "MIT"

from regtrig.control import (
    EventCause,
    EventRecord,
    LyapunovTrigger,
    NormTrigger,
    RunResult,
    RunSummary,
    TriggerConfig,
    run_closed_loop,
    run_nominal,
)
from regtrig.core import (
    ConfigParseError,
    ConfigValidationError,
    ScenarioConfig,
    get_preset,
    list_presets,
    load_config,
    register_preset,
    unregister_preset,
)
from regtrig.harness import (
    ScenarioError,
    compare,
    emit,
    run_batch,
    run_scenario,
    run_selftest,
    sample_trajectory,
)
from regtrig.identification import DeadZone, MinNorm, Tikhonov, WindowSpec
from regtrig.numerics import IntegratorConfig
from regtrig.systems import get_system, list_systems


def run(scenario: "str | ScenarioConfig") -> RunResult:
    """
    Run a scenario given as a config, a preset name or a YAML path.

    Example:
        >>> result = run("lti_scalar")
        >>> result.summary.event_count > 0
        True
    """
    cfg = scenario if isinstance(scenario, ScenarioConfig) else load_config(scenario)
    return run_scenario(cfg)


__all__ = [
    "ConfigParseError",
    "ConfigValidationError",
    "DeadZone",
    "EventCause",
    "EventRecord",
    "IntegratorConfig",
    "LyapunovTrigger",
    "MinNorm",
    "NormTrigger",
    "RunResult",
    "RunSummary",
    "ScenarioConfig",
    "ScenarioError",
    "Tikhonov",
    "TriggerConfig",
    "WindowSpec",
    "__version__",
    "compare",
    "emit",
    "get_preset",
    "get_system",
    "list_presets",
    "list_systems",
    "load_config",
    "register_preset",
    "run",
    "run_batch",
    "run_closed_loop",
    "run_nominal",
    "run_scenario",
    "run_selftest",
    "sample_trajectory",
    "unregister_preset",
]
