"""Scenario configuration and the named scenario registry."""

from dataclasses import asdict, dataclass, fields, replace
from typing import Any

from regtrig.numerics.hybrid_ode import IntegratorConfig

IDENTIFIER_VARIANTS = ("double", "single", "explicit_scalar")
COMPARATORS = ("none", "nominal", "extended_matching")
UPDATE_POLICIES = ("min_norm", "tikhonov", "dead_zone")
REQUIRED_KEYS = ("system", "theta_true", "theta_hat0", "x0", "T", "N_tilde", "t_end")


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Everything needed to reproduce one closed-loop run.

    Attributes:
        system: Catalog name of the plant.
        theta_true: Parameter used to simulate the plant.
        theta_hat0: Initial estimate.
        x0: Initial state.
        T: Longest time between events.
        N_tilde: Window length in multiples of T.
        t_end: Final time.
        name: Scenario name, echoed in outputs.
        a_scale: Trigger offset a(x) = a_scale * |x|^2.
        eps: Constant added to the trigger threshold.
        A1: Amplitude of the parameter disturbance.
        A2: Amplitude of the additive disturbance.
        rel_tol: Integrator relative tolerance.
        abs_tol: Integrator absolute tolerance.
        max_step: Integrator step cap.
        event_tol: Event localization width.
        identifier: Gram construction, one of ``IDENTIFIER_VARIANTS``.
        comparator: ``none`` for the event-triggered scheme, ``nominal`` for the
            known-parameter loop, ``extended_matching`` for the continuous adaptive law.
        gamma: Adaptation gain of the continuous comparator.
        update_policy: One of ``UPDATE_POLICIES``.
        rank_tol: Relative eigenvalue truncation of the min-norm projection.
        tikhonov_eta: Regularization weight for the Tikhonov policy.
        dead_zone: Gate threshold of the dead-zone policy; eps when unset.
        max_events: Event budget.
        lti: Linear plant description for ``lti_custom`` (A, B, C, K0, K, M, a).
    """

    system: str
    theta_true: tuple[float, ...]
    theta_hat0: tuple[float, ...]
    x0: tuple[float, ...]
    T: float
    N_tilde: int
    t_end: float
    name: str = "custom"
    a_scale: float = 0.05
    eps: float = 0.0
    A1: float = 0.0
    A2: float = 0.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = 0.1
    event_tol: float = 1e-9
    identifier: str = "double"
    comparator: str = "none"
    gamma: float = 5.0
    update_policy: str = "min_norm"
    rank_tol: float = 1e-9
    tikhonov_eta: float = 1e-8
    dead_zone: float | None = None
    max_events: int = 10**6
    lti: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        for key in ("theta_true", "theta_hat0", "x0"):
            object.__setattr__(self, key, tuple(float(v) for v in getattr(self, key)))

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ScenarioConfig":
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        """Plain mapping with lists for vectors; unset optional keys are left out."""
        out = asdict(self)
        for key in ("theta_true", "theta_hat0", "x0"):
            out[key] = list(out[key])
        return {k: v for k, v in out.items() if v is not None}

    def with_name(self, name: str) -> "ScenarioConfig":
        return replace(self, name=name)

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_step=self.max_step,
            event_tol=self.event_tol,
        )

    @property
    def gate(self) -> float:
        return self.eps if self.dead_zone is None else self.dead_zone


# Scenario registry
_PRESET_REGISTRY: dict[str, ScenarioConfig] = {}
_BUILT_IN: set[str] = set()


def register_preset(config: ScenarioConfig) -> None:
    """
    Register a scenario under ``config.name``.

    Raises:
        ValueError: If a scenario with the same name already exists.
    """
    if config.name in _PRESET_REGISTRY:
        raise ValueError(
            f"Preset '{config.name}' already exists. Use a different name or unregister first."
        )
    _PRESET_REGISTRY[config.name] = config


def unregister_preset(name: str) -> None:
    """
    Remove a registered scenario.

    Raises:
        ValueError: If the scenario is not found or is built in.
    """
    if name not in _PRESET_REGISTRY:
        raise ValueError(f"Preset '{name}' not found.")
    if name in _BUILT_IN:
        raise ValueError(f"Cannot unregister built-in preset '{name}'.")
    del _PRESET_REGISTRY[name]


def get_preset(name: str) -> ScenarioConfig:
    """
    Look up a scenario by name.

    Raises:
        ValueError: If the name is not registered.
    """
    if name not in _PRESET_REGISTRY:
        raise ValueError(
            f"Unknown preset '{name}'. Available presets: {list(_PRESET_REGISTRY.keys())}"
        )
    return _PRESET_REGISTRY[name]


def list_presets() -> list[str]:
    return list(_PRESET_REGISTRY.keys())


# Robustness study: theta = 1, theta_hat(0) = -4, x(0) = (1, 1), T = 3, N_tilde = 7.
_STUDY = {
    "system": "disturbed_s6",
    "theta_true": (1.0,),
    "theta_hat0": (-4.0,),
    "x0": (1.0, 1.0),
    "T": 3.0,
    "N_tilde": 7,
    "t_end": 20.0,
    "a_scale": 1.0 / 20.0,
    "eps": 1e-6,
    "gamma": 5.0,
}

# The first window is about 0.015 long, where G is O(1e-9).
_EVENT_TRIGGERED = {"comparator": "none", "update_policy": "min_norm", "rank_tol": 1e-12}

# (A1, A2) -> figure names of the nominal, continuous-adaptive and event-triggered runs.
FIGURE_GROUPS: dict[tuple[float, float], dict[str, tuple[str, ...]]] = {
    (0.0, 0.0): {
        "nominal": ("fig1",),
        "extended_matching": ("fig2", "fig3"),
        "none": ("fig4", "fig5", "fig6"),
    },
    (2.0, 0.0): {
        "nominal": ("fig7",),
        "extended_matching": ("fig8", "fig9"),
        "none": ("fig10", "fig11", "fig12", "fig13"),
    },
    (0.0, 2.0): {
        "nominal": ("fig14",),
        "extended_matching": ("fig15", "fig16"),
        "none": ("fig17", "fig18", "fig19", "fig20"),
    },
}


def _built_in_presets() -> list[ScenarioConfig]:
    presets = []
    for (a1, a2), runs in FIGURE_GROUPS.items():
        for comparator, names in runs.items():
            extra = _EVENT_TRIGGERED if comparator == "none" else {"comparator": comparator}
            base = ScenarioConfig(**{**_STUDY, **extra, "A1": a1, "A2": a2})
            presets.extend(base.with_name(name) for name in names)

    presets.append(
        ScenarioConfig(
            **{
                **_STUDY,
                "name": "fig4_explicit",
                "identifier": "explicit_scalar",
                "update_policy": "dead_zone",
            }
        )
    )
    presets.append(
        ScenarioConfig(
            name="planar_s5",
            system="planar_s5",
            theta_true=(0.5, -0.3),
            theta_hat0=(0.0, 0.0),
            x0=(1.0, -0.5),
            T=1.0,
            N_tilde=3,
            t_end=10.0,
        )
    )
    presets.append(
        ScenarioConfig(
            name="lti_scalar",
            system="lti_custom",
            theta_true=(2.0,),
            theta_hat0=(0.0,),
            x0=(1.0,),
            T=1.0,
            N_tilde=2,
            t_end=5.0,
        )
    )
    return presets


for _preset in _built_in_presets():
    register_preset(_preset)
    _BUILT_IN.add(_preset.name)
