"""Command-line entry point: ``regtrig <command> ...``."""

import argparse
import logging
import sys
from collections.abc import Sequence
from typing import NoReturn
from pathlib import Path

from regtrig.core.config_discovery import load_discovered_scenarios
from regtrig.core.presets import get_preset, list_presets
from regtrig.core.yaml_parser import (
    ConfigParseError,
    ConfigValidationError,
    create_sample_scenario_yaml,
    load_config,
)
from regtrig.harness.compare import RunTable, compare, write_comparison
from regtrig.harness.emit import emit
from regtrig.harness.runner import ScenarioError, run_batch, run_scenario
from regtrig.harness.selftest import run_selftest
from regtrig.systems.catalog import describe_systems

logger = logging.getLogger("regtrig")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SCENARIO = 2
EXIT_SELFTEST = 3


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.scenario)
    out = Path(args.out) if args.out else Path("runs") / cfg.name
    result = run_scenario(cfg)
    for path in emit(result, cfg, out):
        print(path)
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    tables = [RunTable.from_dir(d) for d in args.dirs]
    comparison = compare(tables, since=args.since)
    if args.out:
        write_comparison(comparison, args.out)
    print(comparison.metrics.to_string())
    return EXIT_OK


def _cmd_list_presets(args: argparse.Namespace) -> int:
    for name in list_presets():
        cfg = get_preset(name)
        print(f"{name:16s} {cfg.system:14s} t_end={cfg.t_end:g} comparator={cfg.comparator}")
    return EXIT_OK


def _cmd_list_systems(args: argparse.Namespace) -> int:
    for name, description in describe_systems().items():
        print(f"{name:16s} {description}")
    return EXIT_OK


def _cmd_selftest(args: argparse.Namespace) -> int:
    results = run_selftest()
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST


def _cmd_sample_config(args: argparse.Namespace) -> int:
    create_sample_scenario_yaml(args.path)
    print(args.path)
    return EXIT_OK


def _cmd_batch(args: argparse.Namespace) -> int:
    written = run_batch(args.scenarios, args.out, workers=args.workers)
    for name, path in written.items():
        print(f"{name}: {path}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Reports usage errors with the configuration exit code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="regtrig",
        description="Regulation-triggered adaptive control simulations.",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log per-event detail")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario (YAML file or preset name)")
    p.add_argument("scenario")
    p.add_argument("--out", help="output directory (default runs/<name>)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="compare two or more run directories")
    p.add_argument("dirs", nargs="+")
    p.add_argument("--out", help="write comparison.csv and metrics.csv here")
    p.add_argument("--since", type=float, default=0.0, help="ignore state deltas before this time")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("list-presets", help="list registered scenario presets")
    p.set_defaults(func=_cmd_list_presets)

    p = sub.add_parser("list-systems", help="list catalog plants")
    p.set_defaults(func=_cmd_list_systems)

    p = sub.add_parser("selftest", help="run the built-in acceptance checks")
    p.set_defaults(func=_cmd_selftest)

    p = sub.add_parser("sample-config", help="write an annotated scenario YAML")
    p.add_argument("path")
    p.set_defaults(func=_cmd_sample_config)

    p = sub.add_parser("batch", help="run several scenarios into one output root")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--out", default="runs")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_batch)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    load_discovered_scenarios()

    try:
        return args.func(args)
    except ConfigValidationError as exc:
        for error in exc.errors:
            logger.error("%s: %s", error.field, error.message)
        return EXIT_CONFIG
    except (ConfigParseError, FileNotFoundError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except ScenarioError as exc:
        logger.error("%s", exc)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
