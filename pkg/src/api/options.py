"""Scenario flags shared by the simulate, sweep and validate commands."""
import argparse
from typing import Any, Dict

from src.services.sweep import build_config_data, load_yaml


def add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags that override fields of the scenario file."""
    parser.add_argument("--config", help="YAML scenario file")
    parser.add_argument("--protocol", choices=["adamac", "csma_baseline"])
    parser.add_argument("--p-burst", type=float, help="burst probability per tick")
    parser.add_argument("--periodic-interval", type=float, action="append",
                        help="mean periodic inter-arrival in seconds (repeatable)")
    parser.add_argument("--n-devices", type=int)
    parser.add_argument("--queue-capacity", type=int)
    parser.add_argument("--max-cfp", type=int, help="last mini-slot the CFP may use")
    parser.add_argument("--duration", type=float, help="run time in seconds")
    parser.add_argument("--paper-duration", "--full-duration", dest="full_duration", action="store_true",
                        help="run the full 2000 s instead of the 200 s desk scale")


_FLAG_FIELDS = {
    "protocol": ("protocol",),
    "p_burst": ("traffic", "p_burst"),
    "periodic_interval": ("traffic", "periodic_intervals_s"),
    "n_devices": ("n_devices",),
    "queue_capacity": ("queue_capacity",),
    "max_cfp": ("superframe", "max_cfp_mini_slots"),
    "duration": ("run_time_s",),
}


def scenario_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Nested mapping of the flags that were given."""
    overrides: Dict[str, Any] = {}
    for flag, path in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        target = overrides
        for key in path[:-1]:
            target = target.setdefault(key, {})
        target[path[-1]] = value
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return overrides


def scenario_data(args: argparse.Namespace) -> Dict[str, Any]:
    """Raw scenario mapping after layering flags over the file over defaults."""
    file_data = load_yaml(args.config) if args.config else {}
    return build_config_data(file_data, scenario_overrides(args), full_duration=args.full_duration)
