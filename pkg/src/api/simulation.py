"""Simulation commands: simulate, sweep, summarize."""
import argparse
import os
import sys

from src.api.options import add_scenario_arguments, scenario_data
from src.config import settings
from src.models.scenario import RunPoint, ScenarioConfig
from src.services.sweep import (
    build_points, parse_seeds, run_points, summarize_csv, grid_configs, write_reports, write_summary,
)
from src.utils.logging import sim_logger


logger = sim_logger.get_logger(__name__, 'cli')


def _default_output(name: str) -> str:
    return os.path.join(settings.output_dir, name)


def simulate(args: argparse.Namespace) -> int:
    """Run one scenario at one seed for every configured periodic interval."""
    config = ScenarioConfig.model_validate(scenario_data(args))
    points = [
        RunPoint(config=config, periodic_interval_s=interval, seed=config.seed)
        for interval in config.traffic.periodic_intervals_s
    ]
    reports = run_points(points, workers=1, per_device=bool(args.per_device))
    write_reports(reports, args.output or _default_output("results.csv"), args.per_device)
    return 0


def sweep(args: argparse.Namespace) -> int:
    """Run every (scenario, interval, seed) job; rows land in job order."""
    config = ScenarioConfig.model_validate(scenario_data(args))
    configs = grid_configs(config) if args.scenario_grid else [config]
    seeds = parse_seeds(args.seeds) if args.seeds else [config.seed]
    points = build_points(configs, seeds)
    workers = args.workers or settings.workers

    logger.info(f"Sweeping {len(points)} runs over {len(configs)} scenarios with {workers} workers", extra={
        'component': 'cli',
        'operation': 'sweep',
        'duration_ms': 0,
        'status': 'started'
    })
    reports = run_points(points, workers=workers, per_device=bool(args.per_device))
    write_reports(reports, args.output or _default_output("sweep.csv"), args.per_device)
    return 0


def summarize(args: argparse.Namespace) -> int:
    """Mean of per-seed rows; printed, and written when ``--output`` is given."""
    summary = summarize_csv(args.inputs)
    text = write_summary(summary, args.output)
    if not args.output:
        sys.stdout.write(text)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="run one scenario")
    add_scenario_arguments(parser)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output", help="CSV file to append rows to")
    parser.add_argument("--per-device", help="also append the per-device breakdown to this CSV")
    parser.set_defaults(handler=simulate)

    parser = subparsers.add_parser("sweep", help="run a scenario grid over seeds")
    add_scenario_arguments(parser)
    parser.add_argument("--table4", "--scenario-grid", dest="scenario_grid", action="store_true",
                        help="the six protocol / P_burst scenarios")
    parser.add_argument("--seeds", help="seed list such as 1..5 or 1,2,3")
    parser.add_argument("--workers", type=int, help="worker processes (default ADAMAC_WORKERS)")
    parser.add_argument("--output", help="CSV file to append rows to")
    parser.add_argument("--per-device", help="also append the per-device breakdown to this CSV")
    parser.set_defaults(handler=sweep)

    parser = subparsers.add_parser("summarize", help="average result rows across seeds")
    parser.add_argument("inputs", nargs="+", help="result CSV files")
    parser.add_argument("--output", help="summary CSV (default: stdout)")
    parser.set_defaults(handler=summarize)
