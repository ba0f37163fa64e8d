"""Command-line entry point of the Ada-MAC PAN simulator.

Usage:
    python -m src.main simulate --protocol adamac --p-burst 0.002 --periodic-interval 0.3 --seed 1
    python -m src.main sweep --table4 --seeds 1..5 --output results/grid.csv
    python -m src.main summarize results/grid.csv
    python -m src.main allocate --requests requests.yaml
    python -m src.main validate --config scenario.yaml

Exit codes: 0 success, 1 configuration or input error, 2 internal error.
"""
import argparse
import sys
from typing import Optional, Sequence

import yaml
from pydantic import ValidationError

from src.api import simulation, tools
from src.config import settings
from src.utils.logging import sim_logger


logger = sim_logger.get_logger(__name__, 'application')

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INTERNAL_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adamac",
        description="Discrete-event simulator of Ada-MAC and slotted CSMA/CA star PANs",
    )
    parser.add_argument("--log-level", help="override ADAMAC_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    simulation.register(subparsers)
    tools.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sim_logger.set_level(args.log_level or settings.log_level)

    try:
        return args.handler(args)
    except ValidationError as exc:
        for error in exc.errors():
            path = ".".join(str(part) for part in error["loc"]) or "<root>"
            sys.stderr.write(f"invalid config: {path}: {error['msg']}\n")
        return EXIT_INPUT_ERROR
    except (ValueError, OSError, yaml.YAMLError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    except (AssertionError, RuntimeError) as exc:
        logger.error(f"Internal error in {args.command}: {exc}", extra={
            'component': 'application',
            'operation': args.command,
            'duration_ms': 0,
            'status': 'error'
        }, exc_info=True)
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
