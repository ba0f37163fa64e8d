"""Scenario loading, sweep enumeration and CSV reporting."""
import csv
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import pandas as pd
import yaml

from src.models.metrics import CSV_COLUMNS, CSV_SCHEMA_VERSION, DEVICE_CSV_COLUMNS, MetricsReport
from src.models.scenario import GRID_SCENARIOS, RunPoint, ScenarioConfig
from src.services.simulation import run_point
from src.utils.logging import log_sim_operation, sim_logger


logger = sim_logger.get_logger(__name__, 'sweep')

DESK_RUN_TIME_S = 200.0


def load_yaml(path: str) -> Dict[str, Any]:
    """Read a YAML mapping; an empty file is an empty mapping."""
    with open(path, "r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping at the top level, got {type(data).__name__}")
    return data


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursively overlay ``override`` on ``base``; nested mappings merge, other values replace."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def build_config_data(
    file_data: Optional[Mapping[str, Any]] = None,
    flag_overrides: Optional[Mapping[str, Any]] = None,
    full_duration: bool = False,
) -> Dict[str, Any]:
    """
    Layer a raw scenario mapping: flags > file > desk-scale duration > model defaults.

    Args:
        file_data: Mapping loaded from a scenario file
        flag_overrides: Nested mapping built from command-line flags
        full_duration: Keep the full 2000 s run time instead of the 200 s desk scale

    Returns:
        Mapping ready for ``ScenarioConfig.model_validate``
    """
    data: Dict[str, Any] = {} if full_duration else {"run_time_s": DESK_RUN_TIME_S}
    data = deep_merge(data, file_data or {})
    return deep_merge(data, flag_overrides or {})


def parse_seeds(text: str) -> List[int]:
    """Parse ``1..5``, ``1,3,7`` or a single seed."""
    seeds: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            low, high = (int(value) for value in part.split("..", 1))
            if high < low:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(low, high + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError(f"no seeds in {text!r}")
    return seeds


def grid_configs(base: ScenarioConfig) -> List[ScenarioConfig]:
    """The six (protocol, P_burst) scenarios layered on ``base``."""
    configs = []
    for name, protocol, p_burst in GRID_SCENARIOS:
        data = base.model_dump(mode="json")
        data.update(name=name, protocol=protocol.value)
        data["traffic"]["p_burst"] = p_burst
        configs.append(ScenarioConfig.model_validate(data))
    return configs


def build_points(configs: Iterable[ScenarioConfig], seeds: Sequence[int]) -> List[RunPoint]:
    """Enumerate jobs in (scenario, interval, seed) order."""
    points = []
    for config in configs:
        for interval in config.traffic.periodic_intervals_s:
            for seed in seeds:
                points.append(RunPoint(config=config, periodic_interval_s=interval, seed=seed))
    return points


@log_sim_operation('sweep', 'run_points')
def run_points(points: Sequence[RunPoint], workers: int = 1, per_device: bool = False) -> List[MetricsReport]:
    """Run every job, in parallel when ``workers`` > 1; results keep job order."""
    job = partial(run_point, per_device=per_device)
    if workers <= 1 or len(points) <= 1:
        return [job(point) for point in points]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(job, points))


class CsvReportWriter:
    """Appends report rows to a CSV file, writing the header for a new file."""

    def __init__(self, path: str, columns: Sequence[str] = CSV_COLUMNS):
        self.path = path
        self.columns = list(columns)

    def write(self, rows: Iterable[Mapping[str, str]]) -> int:
        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        new_file = not os.path.exists(self.path) or os.path.getsize(self.path) == 0
        count = 0
        with open(self.path, "a", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=self.columns, lineterminator="\n")
            if new_file:
                writer.writeheader()
            for row in rows:
                writer.writerow(row)
                count += 1
        return count


def write_reports(
    reports: Sequence[MetricsReport],
    output: str,
    per_device_output: Optional[str] = None,
) -> int:
    """Serialize reports in order; returns the number of class rows written."""
    written = CsvReportWriter(output).write(row for report in reports for row in report.csv_rows())
    if per_device_output:
        CsvReportWriter(per_device_output, DEVICE_CSV_COLUMNS).write(
            row for report in reports for row in report.device_rows()
        )
    logger.info(f"Wrote {written} rows in CSV schema {CSV_SCHEMA_VERSION} to {output}", extra={
        'component': 'sweep',
        'operation': 'write_reports',
        'duration_ms': 0,
        'status': 'success'
    })
    return written


SUMMARY_KEYS = ["scenario", "protocol", "p_burst", "periodic_interval_s", "class"]
SUMMARY_VALUES = ["generated", "delivered", "loss_rate", "delivery_ratio", "mean_delay_ms", "max_delay_ms", "deadline_misses"]


def summarize_csv(paths: Sequence[str]) -> pd.DataFrame:
    """
    Average per-seed rows across seeds.

    Args:
        paths: Result CSV files in the per-class schema

    Returns:
        One row per (scenario, protocol, p_burst, interval, class) with
        seed-mean metrics and the number of seeds averaged
    """
    data = pd.concat([pd.read_csv(path) for path in paths], ignore_index=True)
    missing = [column for column in CSV_COLUMNS if column not in data.columns]
    if missing:
        raise ValueError(f"input is missing columns: {', '.join(missing)}")
    data = data.astype({"scenario": str, "protocol": str, "class": str})

    grouped = data.groupby(SUMMARY_KEYS, sort=False)
    summary = grouped[SUMMARY_VALUES].mean()
    summary["seeds"] = grouped["seed"].nunique()
    return summary.reset_index()


def write_summary(summary: pd.DataFrame, output: Optional[str]) -> str:
    text = summary.to_csv(index=False, float_format="%.6f", lineterminator="\n")
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")
    return text
