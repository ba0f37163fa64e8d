"""Desk-check commands: allocate and validate."""
import argparse
import sys
from typing import List

import yaml

from src.api.options import add_scenario_arguments, scenario_data
from src.models.frames import GtsRequestFrame
from src.models.scenario import validate_config
from src.services.allocator import GtsSchedule, allocate


def load_requests(path: str) -> List[GtsRequestFrame]:
    """Read a request table: a YAML list, or a mapping with a ``requests`` list."""
    with open(path, "r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    if isinstance(data, dict):
        data = data.get("requests")
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a list of requests")
    return [GtsRequestFrame.model_validate(entry) for entry in data]


def format_schedule(schedule: GtsSchedule) -> str:
    lines = [f"cfp_length_mini_slots: {schedule.cfp_length_mini_slots}"]
    lines.append(f"{'mac_address':>11}  {'start_slot':>10}  {'length':>6}  status")
    for descriptor in schedule.entries:
        status = f"slots {descriptor.start_slot}..{descriptor.end_slot}" if descriptor.granted else "denied"
        lines.append(
            f"{'0x%04x' % descriptor.mac_address:>11}  {descriptor.start_slot:>10}  {descriptor.length:>6}  {status}"
        )
    return "\n".join(lines) + "\n"


def allocate_command(args: argparse.Namespace) -> int:
    schedule = allocate(load_requests(args.requests), max_slot=args.max_slot)
    sys.stdout.write(format_schedule(schedule))
    return 0


def validate_command(args: argparse.Namespace) -> int:
    """Print ``ok`` or one violation per line; violations exit with status 1."""
    violations = validate_config(scenario_data(args))
    if not violations:
        sys.stdout.write("ok\n")
        return 0
    for violation in violations:
        sys.stdout.write(f"{violation}\n")
    return 1


def register(subparsers) -> None:
    parser = subparsers.add_parser("allocate", help="run the GTS allocator on a request table")
    parser.add_argument("--requests", required=True, help="YAML request table")
    parser.add_argument("--max-slot", type=int, default=48, help="last mini-slot the CFP may use")
    parser.set_defaults(handler=allocate_command)

    parser = subparsers.add_parser("validate", help="check a scenario configuration")
    add_scenario_arguments(parser)
    parser.set_defaults(handler=validate_command)
