"""Experiment configuration models.

Defaults reproduce the health-monitoring parameter set: 16 devices, queue of
10 frames, MinBE 3 / MaxBE 5 / MaxNB 4 / MaxFrameRetries 3, 50-byte MSDU,
BO = SO = 4 and a 2000 s run.
"""
from enum import Enum
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator


SYMBOL_SECONDS = 16e-6
SYMBOLS_PER_SECOND = 62500
BASE_SUPERFRAME_SYMBOLS = 960
BACKOFF_PERIOD_SYMBOLS = 20
PHY_OVERHEAD_BYTES = 6
MAC_DATA_OVERHEAD_BYTES = 11
TURNAROUND_SYMBOLS = 12
ACK_SYMBOLS = 34
ACK_WAIT_SYMBOLS = TURNAROUND_SYMBOLS + ACK_SYMBOLS + BACKOFF_PERIOD_SYMBOLS
# One contention-free GTS request exchange: 42-symbol request plus the ACK wait
REQUEST_SLOT_SYMBOLS = 6 * BACKOFF_PERIOD_SYMBOLS


class Protocol(str, Enum):
    """MAC protocol driven by a run."""
    ADAMAC = "adamac"
    CSMA_BASELINE = "csma_baseline"


class BaselineQueueing(str, Enum):
    """How the baseline device drains its buffers into CSMA/CA."""
    STRICT_PRIORITY = "strict_priority"
    SINGLE_FIFO = "single_fifo"


class RequestAccess(str, Enum):
    """How devices reach the coordinator inside the request window."""
    SCHEDULED = "scheduled"
    CSMA = "csma"


class BurstTickBase(str, Enum):
    """Time base of the per-tick burst Bernoulli trial."""
    MINI_SLOT = "mini_slot"
    BACKOFF_PERIOD = "backoff_period"


class PeriodicMode(str, Enum):
    """Inter-arrival law of the periodic stream."""
    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"


class SuperframeConfig(BaseModel):
    """Superframe geometry shared by coordinator and devices."""
    model_config = ConfigDict(extra="forbid")

    beacon_order: int = Field(default=4, ge=0, le=14)
    superframe_order: int = Field(default=4, ge=0, le=14)
    mini_slots: int = Field(default=64, ge=1, le=64)
    max_cfp_mini_slots: int = Field(default=55, ge=1, le=64)
    request_window_slots: int = Field(default=8, ge=1, le=32)
    request_access: RequestAccess = RequestAccess.SCHEDULED

    @model_validator(mode="after")
    def _check_geometry(self):
        if self.beacon_order < self.superframe_order:
            raise ValueError("beacon_order must be >= superframe_order")
        if self.superframe_symbols % self.mini_slots:
            raise ValueError(
                f"superframe duration {self.superframe_symbols} symbols is not divisible "
                f"by {self.mini_slots} mini-slots"
            )
        if self.mini_slot_symbols % BACKOFF_PERIOD_SYMBOLS:
            raise ValueError(
                f"mini-slot of {self.mini_slot_symbols} symbols is not a whole number "
                f"of {BACKOFF_PERIOD_SYMBOLS}-symbol backoff periods"
            )
        if self.max_cfp_mini_slots > self.mini_slots:
            raise ValueError("max_cfp_mini_slots cannot exceed mini_slots")
        if self.max_cfp_mini_slots + self.request_window_slots >= self.mini_slots:
            raise ValueError("CFP and request window leave no room for CAP data")
        return self

    @property
    def superframe_symbols(self) -> int:
        return BASE_SUPERFRAME_SYMBOLS * (2 ** self.superframe_order)

    @property
    def beacon_interval_symbols(self) -> int:
        return BASE_SUPERFRAME_SYMBOLS * (2 ** self.beacon_order)

    @property
    def mini_slot_symbols(self) -> int:
        return self.superframe_symbols // self.mini_slots

    @property
    def request_slots(self) -> int:
        """Dedicated request sub-slots that fit in the request window."""
        return self.request_window_slots * self.mini_slot_symbols // REQUEST_SLOT_SYMBOLS


class CsmaParameters(BaseModel):
    """Slotted CSMA/CA constants."""
    model_config = ConfigDict(extra="forbid")

    min_be: int = Field(default=3, ge=0, le=8)
    max_be: int = Field(default=5, ge=3, le=8)
    max_nb: int = Field(default=4, ge=0, le=5)
    max_frame_retries: int = Field(default=3, ge=0, le=7)
    baseline_queueing: BaselineQueueing = BaselineQueueing.STRICT_PRIORITY

    @model_validator(mode="after")
    def _check_exponents(self):
        if self.min_be > self.max_be:
            raise ValueError("min_be must be <= max_be")
        return self


class AllocatorConfig(BaseModel):
    """Knobs of the adaptive mini-slot assignment."""
    model_config = ConfigDict(extra="forbid")

    per_node_cap_slots: int = Field(default=8, ge=1, le=64)
    # Every device requests each superframe, idle or not, and keeps a standing slot
    request_all_nodes: bool = True


class TrafficConfig(BaseModel):
    """Application traffic shared by every device."""
    model_config = ConfigDict(extra="forbid")

    p_burst: float = Field(default=0.002, ge=0.0, le=1.0)
    periodic_intervals_s: List[float] = Field(
        default_factory=lambda: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
        min_length=1,
    )
    normal_interval_s: float = Field(default=0.05, gt=0.0)
    periodic_mode: PeriodicMode = PeriodicMode.EXPONENTIAL
    burst_tick_base: BurstTickBase = BurstTickBase.MINI_SLOT
    burst_deadline_ms: float = Field(default=250.0, gt=0.0)
    periodic_deadline_ms: float = Field(default=450.0, gt=0.0)

    @model_validator(mode="after")
    def _check_intervals(self):
        for interval in self.periodic_intervals_s:
            if interval <= 0.0:
                raise ValueError("periodic intervals must be positive")
        return self


class ScenarioConfig(BaseModel):
    """Complete parameterization of one experiment."""
    model_config = ConfigDict(extra="forbid")

    name: str = "custom"
    protocol: Protocol = Protocol.ADAMAC
    n_devices: int = Field(default=16, ge=1, le=0xFFFD)
    run_time_s: float = Field(default=2000.0, gt=0.0)
    seed: int = Field(default=1, ge=0, lt=2 ** 64)
    queue_capacity: int = Field(default=10, ge=1)
    realtime_cap_fallback: bool = False
    msdu_bytes: int = Field(default=50, ge=9, le=116)
    superframe: SuperframeConfig = Field(default_factory=SuperframeConfig)
    csma: CsmaParameters = Field(default_factory=CsmaParameters)
    allocator: AllocatorConfig = Field(default_factory=AllocatorConfig)
    traffic: TrafficConfig = Field(default_factory=TrafficConfig)

    @model_validator(mode="after")
    def _check_slot_capacity(self):
        # Frame plus the full ACK wait must close inside one GTS mini-slot
        exchange = data_frame_symbols(self.msdu_bytes) + ACK_WAIT_SYMBOLS
        if exchange > self.superframe.mini_slot_symbols:
            raise ValueError(
                f"a {self.msdu_bytes}-byte data exchange needs {exchange} symbols, more than "
                f"one {self.superframe.mini_slot_symbols}-symbol mini-slot"
            )
        if self.allocator.per_node_cap_slots > self.superframe.max_cfp_mini_slots:
            raise ValueError("allocator.per_node_cap_slots cannot exceed superframe.max_cfp_mini_slots")
        superframe = self.superframe
        scheduled = self.protocol is Protocol.ADAMAC and superframe.request_access is RequestAccess.SCHEDULED
        if scheduled and self.n_devices > superframe.request_slots:
            raise ValueError(
                f"{self.n_devices} devices need more request sub-slots than the "
                f"{superframe.request_window_slots}-slot request window holds ({superframe.request_slots})"
            )
        return self

    @property
    def run_time_symbols(self) -> int:
        return seconds_to_symbols(self.run_time_s)


class TrafficProfile(BaseModel):
    """Per-device traffic parameters of a single run."""
    model_config = ConfigDict(frozen=True)

    p_burst: float = Field(ge=0.0, le=1.0)
    periodic_interval_s: float = Field(gt=0.0)
    normal_interval_s: float = Field(gt=0.0)
    burst_deadline_ms: float = 250.0
    periodic_deadline_ms: float = 450.0
    periodic_mode: PeriodicMode = PeriodicMode.EXPONENTIAL
    burst_tick_base: BurstTickBase = BurstTickBase.MINI_SLOT

    @classmethod
    def from_scenario(cls, config: ScenarioConfig, periodic_interval_s: float) -> "TrafficProfile":
        traffic = config.traffic
        return cls(
            p_burst=traffic.p_burst,
            periodic_interval_s=periodic_interval_s,
            normal_interval_s=traffic.normal_interval_s,
            burst_deadline_ms=traffic.burst_deadline_ms,
            periodic_deadline_ms=traffic.periodic_deadline_ms,
            periodic_mode=traffic.periodic_mode,
            burst_tick_base=traffic.burst_tick_base,
        )


class RunPoint(BaseModel):
    """One simulation job: a scenario at a single sweep interval and seed."""
    model_config = ConfigDict(frozen=True)

    config: ScenarioConfig
    periodic_interval_s: float = Field(gt=0.0)
    seed: int = Field(ge=0, lt=2 ** 64)


# The six (protocol, P_burst) pairs of the health-monitoring study
GRID_SCENARIOS: Tuple[Tuple[str, Protocol, float], ...] = (
    ("scenario1", Protocol.ADAMAC, 0.002),
    ("scenario2", Protocol.ADAMAC, 0.001),
    ("scenario3", Protocol.ADAMAC, 0.0005),
    ("scenario4", Protocol.CSMA_BASELINE, 0.002),
    ("scenario5", Protocol.CSMA_BASELINE, 0.001),
    ("scenario6", Protocol.CSMA_BASELINE, 0.0005),
)


def seconds_to_symbols(seconds: float) -> int:
    """Convert seconds to whole symbols (nearest)."""
    return int(round(seconds * SYMBOLS_PER_SECOND))


def symbols_to_seconds(symbols: int) -> float:
    return symbols * SYMBOL_SECONDS


def symbols_to_ms(symbols: int) -> float:
    return symbols * SYMBOL_SECONDS * 1000.0


def airtime_symbols(mac_frame_bytes: int) -> int:
    """PHY airtime of a MAC frame: 6 bytes of SHR+PHR, 2 symbols per byte."""
    return (PHY_OVERHEAD_BYTES + mac_frame_bytes) * 2


def data_frame_symbols(msdu_bytes: int) -> int:
    return airtime_symbols(MAC_DATA_OVERHEAD_BYTES + msdu_bytes)


def validate_config(data: Dict[str, Any]) -> List[str]:
    """
    Check a raw scenario mapping against every ScenarioConfig rule.

    Args:
        data: Scenario mapping as loaded from YAML

    Returns:
        ``field.path: message`` strings; empty when the config is valid
    """
    try:
        ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        violations = []
        for error in exc.errors():
            path = ".".join(str(part) for part in error["loc"]) or "<root>"
            violations.append(f"{path}: {error['msg']}")
        return violations
    return []
