"""Per-class delay, loss and delivery accounting for one run."""
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple, Union

from src.models.frames import DataFrame, TrafficClass
from src.models.metrics import (
    ChannelStats, ClassSummary, DeviceSummary, LossCause, MetricsReport, RunMetadata,
)
from src.models.scenario import TrafficProfile, seconds_to_symbols, symbols_to_ms


class OutcomeError(RuntimeError):
    """A frame outcome was recorded twice or for an unknown frame."""


@dataclass(frozen=True, slots=True)
class Delivered:
    at: int


@dataclass(frozen=True, slots=True)
class Lost:
    cause: LossCause


Outcome = Union[Delivered, Lost]


@dataclass(slots=True)
class FrameRecord:
    """Life of one generated frame."""
    traffic_class: TrafficClass
    device: int
    gen_time: int
    deadline: Optional[int]
    outcome: Optional[Outcome] = None

    @property
    def delay(self) -> Optional[int]:
        if isinstance(self.outcome, Delivered):
            return self.outcome.at - self.gen_time
        return None


class MetricsCollector:
    """Collects one FrameRecord per generated frame."""

    def __init__(self, profile: TrafficProfile):
        self.deadlines: Dict[TrafficClass, Optional[int]] = {
            TrafficClass.BURST: seconds_to_symbols(profile.burst_deadline_ms / 1000.0),
            TrafficClass.PERIODIC: seconds_to_symbols(profile.periodic_deadline_ms / 1000.0),
            TrafficClass.NORMAL: None,
        }
        self.records: Dict[Tuple[int, int, int], FrameRecord] = {}
        self.unresolved = 0

    def record_generation(self, frame: DataFrame) -> None:
        key = frame.key
        if key in self.records:
            raise OutcomeError(f"frame {key} generated twice")
        self.records[key] = FrameRecord(
            traffic_class=frame.traffic_class,
            device=frame.src,
            gen_time=frame.gen_time,
            deadline=self.deadlines[frame.traffic_class],
        )
        self.unresolved += 1

    def record_outcome(self, frame: DataFrame, outcome: Outcome) -> None:
        record = self.records.get(frame.key)
        if record is None:
            raise OutcomeError(f"outcome for unknown frame {frame.key}")
        if record.outcome is not None:
            raise OutcomeError(f"frame {frame.key} already resolved as {record.outcome}, got {outcome}")
        record.outcome = outcome
        self.unresolved -= 1

    def finalize(self) -> int:
        """Mark every unresolved frame lost as pending at run end; returns the count."""
        pending = 0
        for record in self.records.values():
            if record.outcome is None:
                record.outcome = Lost(LossCause.PENDING_AT_END)
                pending += 1
        self.unresolved = 0
        return pending

    def summarize(
        self,
        metadata: RunMetadata,
        channel: Optional[ChannelStats] = None,
        radio_on_symbols: Optional[Mapping[int, int]] = None,
    ) -> MetricsReport:
        """
        Build the run report.

        Args:
            metadata: Run identification
            channel: Air-interface counters
            radio_on_symbols: Transceiver-on time per device for the verbose breakdown

        Returns:
            MetricsReport with one ClassSummary per traffic class
        """
        if self.unresolved:
            raise OutcomeError(f"{self.unresolved} frames still unresolved; call finalize() first")

        summaries = {traffic_class: ClassSummary(traffic_class=traffic_class) for traffic_class in TrafficClass}
        delay_totals: Counter = Counter()
        delay_max: Dict[TrafficClass, int] = {}
        in_deadline: Counter = Counter()
        per_device: Dict[Tuple[int, TrafficClass], Counter] = {}

        for record in self.records.values():
            summary = summaries[record.traffic_class]
            summary.generated += 1
            device_counts = per_device.setdefault((record.device, record.traffic_class), Counter())
            device_counts["generated"] += 1
            outcome = record.outcome
            if isinstance(outcome, Delivered):
                delay = outcome.at - record.gen_time
                summary.delivered += 1
                device_counts["delivered"] += 1
                delay_totals[record.traffic_class] += delay
                delay_max[record.traffic_class] = max(delay, delay_max.get(record.traffic_class, 0))
                if record.deadline is not None and delay > record.deadline:
                    summary.deadline_miss_count += 1
                else:
                    in_deadline[record.traffic_class] += 1
            else:
                summary.lost_by_cause[outcome.cause] += 1
                device_counts["lost"] += 1

        for traffic_class, summary in summaries.items():
            if summary.delivered:
                summary.mean_delay_ms = symbols_to_ms(delay_totals[traffic_class]) / summary.delivered
                summary.max_delay_ms = symbols_to_ms(delay_max[traffic_class])
            if summary.generated:
                summary.loss_rate = (summary.generated - summary.delivered) / summary.generated
                summary.delivery_ratio = in_deadline[traffic_class] / summary.generated

        devices = []
        if radio_on_symbols is not None:
            for (device, traffic_class), counts in sorted(per_device.items(), key=lambda item: (item[0][0], item[0][1].value)):
                devices.append(DeviceSummary(
                    device=device,
                    traffic_class=traffic_class,
                    generated=counts["generated"],
                    delivered=counts["delivered"],
                    lost=counts["lost"],
                    radio_on_ms=symbols_to_ms(radio_on_symbols.get(device, 0)),
                ))

        return MetricsReport(
            metadata=metadata,
            classes=summaries,
            channel=channel or ChannelStats(),
            devices=devices,
        )
