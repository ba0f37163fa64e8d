"""Run result models."""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from src.models.frames import TrafficClass


CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "scenario", "protocol", "p_burst", "periodic_interval_s", "seed", "class",
    "generated", "delivered", "loss_rate", "delivery_ratio",
    "mean_delay_ms", "max_delay_ms", "deadline_misses",
)
DEVICE_CSV_COLUMNS = (
    "scenario", "protocol", "p_burst", "periodic_interval_s", "seed", "device", "class",
    "generated", "delivered", "lost", "radio_on_ms",
)


class LossCause(str, Enum):
    """Why a generated frame never reached the coordinator."""
    QUEUE_OVERFLOW = "queue_overflow"
    CHANNEL_ACCESS_FAILURE = "channel_access_failure"
    RETRY_FAILURE = "retry_failure"
    PENDING_AT_END = "pending_at_end"


class ClassSummary(BaseModel):
    """Per-class accounting of one run."""
    traffic_class: TrafficClass
    generated: int = 0
    delivered: int = 0
    lost_by_cause: Dict[LossCause, int] = Field(default_factory=lambda: {cause: 0 for cause in LossCause})
    mean_delay_ms: Optional[float] = None
    max_delay_ms: Optional[float] = None
    loss_rate: Optional[float] = None
    delivery_ratio: Optional[float] = None
    deadline_miss_count: int = 0

    @property
    def lost(self) -> int:
        return sum(self.lost_by_cause.values())


class ChannelStats(BaseModel):
    """Air-interface counters of one run."""
    transmissions: int = 0
    delivered: int = 0
    collisions_by_period: Dict[str, int] = Field(default_factory=dict)

    @property
    def cfp_collisions(self) -> int:
        return self.collisions_by_period.get("cfp", 0)


class RunMetadata(BaseModel):
    """Parameters identifying the run a report belongs to."""
    scenario: str
    protocol: str
    p_burst: float
    periodic_interval_s: float
    seed: int
    duration_s: float
    burst_tick_base: str
    periodic_mode: str
    schema_version: int = CSV_SCHEMA_VERSION


class DeviceSummary(BaseModel):
    """Verbose per-device breakdown row."""
    device: int
    traffic_class: TrafficClass
    generated: int = 0
    delivered: int = 0
    lost: int = 0
    radio_on_ms: float = 0.0


class MetricsReport(BaseModel):
    """Summary of one run: per-class metrics plus run metadata."""
    metadata: RunMetadata
    classes: Dict[TrafficClass, ClassSummary]
    channel: ChannelStats = Field(default_factory=ChannelStats)
    devices: List[DeviceSummary] = Field(default_factory=list)

    def csv_rows(self) -> List[Dict[str, str]]:
        """One row per traffic class, formatted for the versioned CSV schema."""
        rows = []
        for traffic_class in TrafficClass:
            summary = self.classes[traffic_class]
            rows.append({
                "scenario": self.metadata.scenario,
                "protocol": self.metadata.protocol,
                "p_burst": _fmt(self.metadata.p_burst, 6),
                "periodic_interval_s": _fmt(self.metadata.periodic_interval_s, 3),
                "seed": str(self.metadata.seed),
                "class": traffic_class.value,
                "generated": str(summary.generated),
                "delivered": str(summary.delivered),
                "loss_rate": _fmt(summary.loss_rate, 6),
                "delivery_ratio": _fmt(summary.delivery_ratio, 6),
                "mean_delay_ms": _fmt(summary.mean_delay_ms, 3),
                "max_delay_ms": _fmt(summary.max_delay_ms, 3),
                "deadline_misses": str(summary.deadline_miss_count),
            })
        return rows

    def device_rows(self) -> List[Dict[str, str]]:
        rows = []
        for entry in self.devices:
            rows.append({
                "scenario": self.metadata.scenario,
                "protocol": self.metadata.protocol,
                "p_burst": _fmt(self.metadata.p_burst, 6),
                "periodic_interval_s": _fmt(self.metadata.periodic_interval_s, 3),
                "seed": str(self.metadata.seed),
                "device": str(entry.device),
                "class": entry.traffic_class.value,
                "generated": str(entry.generated),
                "delivered": str(entry.delivered),
                "lost": str(entry.lost),
                "radio_on_ms": _fmt(entry.radio_on_ms, 3),
            })
        return rows


def _fmt(value: Optional[float], digits: int) -> str:
    # Empty cell marks a not-applicable ratio or delay
    if value is None:
        return ""
    return f"{value:.{digits}f}"
