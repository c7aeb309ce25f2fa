"""Turn scenario configurations into closed-loop runs."""

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from regtrig.control.closed_loop import (
    DisturbanceFn,
    RunawayError,
    RunResult,
    run_closed_loop,
    run_extended_matching,
    run_nominal,
)
from regtrig.control.trigger import LyapunovTrigger, TriggerConfig, quadratic_offset
from regtrig.core.presets import ScenarioConfig
from regtrig.core.yaml_parser import load_config
from regtrig.identification.identifier import (
    DeadZone,
    GenericAccumulator,
    IdentifierError,
    MinNorm,
    Tikhonov,
    UpdatePolicy,
    WindowSpec,
)
from regtrig.numerics.hybrid_ode import IntegrationError
from regtrig.numerics.linalg import LinalgError
from regtrig.systems.base import DisturbanceSpec, PlantCatalogEntry
from regtrig.systems.catalog import get_system
from regtrig.systems.disturbed import comparator_extended_matching
from regtrig.systems.lti import affine_lti_spec

logger = logging.getLogger(__name__)


class ScenarioError(RuntimeError):
    """A simulation failure, tagged with the scenario that produced it."""

    def __init__(self, scenario: str, cause: Exception) -> None:
        self.scenario = scenario
        self.cause = cause
        super().__init__(f"scenario '{scenario}' failed: {cause}")


def catalog_entry(cfg: ScenarioConfig) -> PlantCatalogEntry:
    spec = affine_lti_spec(**cfg.lti) if cfg.lti is not None else None
    return get_system(cfg.system, spec)


def update_policy(cfg: ScenarioConfig) -> UpdatePolicy:
    if cfg.update_policy == "tikhonov":
        return Tikhonov(eta=cfg.tikhonov_eta)
    if cfg.update_policy == "dead_zone":
        return DeadZone(rank_tol=cfg.rank_tol, eps=cfg.gate)
    return MinNorm(rank_tol=cfg.rank_tol)


def disturbance_fn(entry: PlantCatalogEntry, cfg: ScenarioConfig) -> DisturbanceFn | None:
    if entry.disturbance is None or not (cfg.A1 or cfg.A2):
        return None
    spec = DisturbanceSpec(A1=cfg.A1, A2=cfg.A2)
    drift = entry.disturbance

    def disturbance(t: float, x: np.ndarray) -> np.ndarray:
        return drift(t, x, spec)

    return disturbance


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    """
    Run one scenario.

    Args:
        cfg: Validated scenario.

    Returns:
        The RunResult.

    Raises:
        ScenarioError: If the simulation fails.
    """
    logger.info("running scenario '%s' (%s, comparator=%s)", cfg.name, cfg.system, cfg.comparator)
    try:
        entry = catalog_entry(cfg)
        plant = entry.plant
        integrator = cfg.integrator_config()

        disturbance = disturbance_fn(entry, cfg)

        if cfg.comparator == "nominal":
            result = run_nominal(
                plant, entry.controller, cfg.theta_true, cfg.x0, cfg.t_end, integrator, disturbance
            )
        elif cfg.comparator == "extended_matching":
            result = run_extended_matching(
                plant,
                comparator_extended_matching(cfg.gamma),
                cfg.theta_true,
                cfg.theta_hat0,
                cfg.x0,
                cfg.t_end,
                integrator,
                disturbance,
            )
        else:
            trig_cfg = TriggerConfig(T=cfg.T, a_fn=quadratic_offset(cfg.a_scale), eps=cfg.eps)
            if entry.make_trigger is not None:
                trigger = entry.make_trigger(trig_cfg)
            else:
                trigger = LyapunovTrigger(entry.controller, trig_cfg)
            if entry.make_accumulator is not None:
                accumulator = entry.make_accumulator(cfg.identifier)
            else:
                accumulator = GenericAccumulator(plant, cfg.identifier)
            result = run_closed_loop(
                plant,
                entry.controller,
                trigger,
                WindowSpec(N_tilde=cfg.N_tilde, T=cfg.T),
                update_policy(cfg),
                cfg.theta_true,
                cfg.theta_hat0,
                cfg.x0,
                cfg.t_end,
                integrator,
                disturbance=disturbance,
                accumulator=accumulator,
                max_events=cfg.max_events,
            )
    except (IntegrationError, RunawayError, IdentifierError, LinalgError) as exc:
        raise ScenarioError(cfg.name, exc) from exc

    s = result.summary
    logger.info(
        "scenario '%s': %d events, first at %s, converged at %s, final |x| = %.3e",
        cfg.name,
        s.event_count,
        s.first_event_time,
        s.convergence_time,
        s.final_norm_x,
    )
    return result


def _run_and_emit(source: "ScenarioConfig | str", out_root: str) -> tuple[str, Path]:
    from regtrig.harness.emit import emit

    cfg = source if isinstance(source, ScenarioConfig) else load_config(source)
    out_dir = Path(out_root) / cfg.name
    emit(run_scenario(cfg), cfg, out_dir)
    return cfg.name, out_dir


def run_batch(
    sources: Sequence["ScenarioConfig | str"],
    out_root: str | Path,
    workers: int = 1,
) -> dict[str, Path]:
    """
    Run several scenarios, each into ``out_root/<name>``.

    Args:
        sources: Scenario configs, preset names or YAML paths.
        out_root: Parent output directory.
        workers: Number of worker processes; 1 runs in this process.

    Returns:
        Mapping of scenario name to its output directory.
    """
    out_root = str(out_root)
    if workers <= 1:
        return dict(_run_and_emit(src, out_root) for src in sources)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_and_emit, src, out_root) for src in sources]
        return dict(f.result() for f in futures)
