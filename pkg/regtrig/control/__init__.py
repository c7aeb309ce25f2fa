"""Certainty-equivalence control, event triggering and the hybrid closed loop."""

from regtrig.control.closed_loop import (
    EventCause,
    EventRecord,
    RunawayError,
    RunResult,
    RunSummary,
    run_closed_loop,
    run_extended_matching,
    run_nominal,
)
from regtrig.control.trigger import (
    LyapunovTrigger,
    NormTrigger,
    Trigger,
    TriggerConfig,
    control,
    guard,
    lti_guard,
    next_event_time,
)

__all__ = [
    "EventCause",
    "EventRecord",
    "LyapunovTrigger",
    "NormTrigger",
    "RunResult",
    "RunSummary",
    "RunawayError",
    "Trigger",
    "TriggerConfig",
    "control",
    "guard",
    "lti_guard",
    "next_event_time",
    "run_closed_loop",
    "run_extended_matching",
    "run_nominal",
]
