"""Command-line entry point: ``python -m app.main <subcommand>``.

Subcommands:
    simulate  run an experiment config (one ensemble per N x stake row)
    moments   write the exact moment table of a moments config
    limits    classify every (N, stake) row and print its limit law or statement
    figure    reproduce a catalogued figure as CSV + manifest
    check     run an acceptance suite and write a JSON report

Exit status: 0 on success, 1 when a check fails, 2 on configuration or domain
errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from app.config import config_hash, load_experiment_config, load_lab_settings, load_moments_config
from app.config.models import LabSettings
from app.core.enums import CheckSuite
from app.core.errors import LabError
from app.lab import FIGURES, apply_scale, limit_table, run_checks, run_experiment, run_figure
from app.moments import raw_moment_table
from app.telemetry import configure_logging
from app.telemetry.events import RunManifest
from app.telemetry.storage import ResultStorage


def _add_run_flags(parser: argparse.ArgumentParser, *, replicates: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed (u64); defaults to the config's")
    parser.add_argument("--threads", type=int, default=None, help="worker threads; never changes output bytes")
    parser.add_argument("--scale", type=float, default=1.0, help="desk-scale factor in (0, 1]")
    if replicates:
        parser.add_argument("--replicates", type=int, default=None, help="override the replicate count")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--settings", type=Path, default=None, help="lab settings YAML (default config/lab.yml)")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--log-level", default=None, help="logging level (default from settings)")

    parser = argparse.ArgumentParser(prog="stake-lab", description="Proof-of-stake share dynamics lab.")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", parents=[common], help="run an experiment config")
    simulate.add_argument("--config", type=Path, required=True)
    _add_run_flags(simulate)

    moments = sub.add_parser("moments", parents=[common], help="exact moment table")
    moments.add_argument("--config", type=Path, required=True)

    limits = sub.add_parser("limits", parents=[common], help="investor classification and limit laws")
    limits.add_argument("--config", type=Path, required=True)

    figure = sub.add_parser("figure", parents=[common], help="reproduce a catalogued figure")
    figure.add_argument("name", choices=FIGURES)
    _add_run_flags(figure)

    check = sub.add_parser("check", parents=[common], help="run an acceptance suite")
    check.add_argument("suite", choices=[suite.value for suite in CheckSuite])
    _add_run_flags(check, replicates=False)
    return parser


def _storage(args: argparse.Namespace, settings: LabSettings) -> ResultStorage:
    return ResultStorage(args.out or Path(settings.output_dir))


def _threads(args: argparse.Namespace, settings: LabSettings) -> int:
    return args.threads if args.threads is not None else settings.threads


def _simulate(args: argparse.Namespace, settings: LabSettings, logger: logging.Logger) -> int:
    config = apply_scale(load_experiment_config(args.config), args.scale)
    if args.replicates is not None:
        config = config.model_copy(update={"replicates": args.replicates})
    result = run_experiment(
        config,
        master_seed=args.seed,
        threads=_threads(args, settings),
        batch_size=settings.batch_size,
        storage=_storage(args, settings),
    )
    logger.info("Experiment written", extra={"experiment": result.name, "outputs": result.outputs})
    return 0


def _moments(args: argparse.Namespace, settings: LabSettings, logger: logging.Logger) -> int:
    started = time.perf_counter()
    config = load_moments_config(args.config)
    storage = _storage(args, settings)
    name = config.output or "moments"
    table = raw_moment_table(config.schedule.build(), config.N, config.pi0, config.horizon, config.max_order)
    table.to_csv(storage.path(f"{name}.csv"))
    storage.write_manifest(
        RunManifest(
            name=name,
            config_hash=config_hash(config),
            master_seed=0,
            replicates=0,
            runtime_sec=round(time.perf_counter() - started, 3),
            outputs=[f"{name}.csv"],
            config=config.model_dump(mode="json"),
            notes=["exact recursion; no randomness involved"],
        )
    )
    logger.info("Moment table written", extra={"horizon": config.horizon, "output": f"{name}.csv"})
    return 0


def _limits(args: argparse.Namespace, settings: LabSettings, logger: logging.Logger) -> int:
    config = load_experiment_config(args.config)
    fieldnames, rows = limit_table(config)
    name = f"{config.output or config.name}_limits.csv"
    _storage(args, settings).write_table(name, fieldnames, rows)
    for row in rows:
        print(f"N={row['N']:g} stake={row['stake']} class={row['class']} limit={row['limit']} {row['detail']}")
    logger.info("Limit table written", extra={"output": name, "rows": len(rows)})
    return 0


def _figure(args: argparse.Namespace, settings: LabSettings, logger: logging.Logger) -> int:
    result = run_figure(
        args.name,
        scale=args.scale,
        replicates=args.replicates,
        master_seed=args.seed,
        threads=_threads(args, settings),
        batch_size=settings.batch_size,
        storage=_storage(args, settings),
    )
    logger.info("Figure written", extra={"figure": args.name, "outputs": result.outputs})
    return 0


def _check(args: argparse.Namespace, settings: LabSettings, logger: logging.Logger) -> int:
    report = run_checks(
        args.suite,
        master_seed=args.seed or 0,
        scale=args.scale,
        threads=_threads(args, settings),
        batch_size=settings.batch_size,
    )
    path = _storage(args, settings).write_report(report)
    for record in report.records:
        status = "PASS" if record.passed else "FAIL"
        print(f"{status} {record.criterion}: measured={record.measured!r} tolerance={record.tolerance!r} {record.detail}")
    logger.info("Check report written", extra={"suite": report.suite, "passed": report.passed, "report": str(path)})
    return 0 if report.passed else 1


_COMMANDS = {
    "simulate": _simulate,
    "moments": _moments,
    "limits": _limits,
    "figure": _figure,
    "check": _check,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_lab_settings(args.settings) if args.settings else load_lab_settings()
    except (LabError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log_dir: Optional[Path] = Path(settings.log_dir) if settings.log_dir else None
    logger = configure_logging(log_dir=log_dir, level=args.log_level or settings.log_level)
    try:
        return _COMMANDS[args.command](args, settings, logger)
    except (LabError, FileNotFoundError, ValueError) as exc:
        logger.error("Command failed", extra={"command": args.command, "error": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return 2


__all__: List[str] = ["build_parser", "main"]


if __name__ == "__main__":
    sys.exit(main())
