"""Behaviour shared by every end device of the PAN."""
from typing import Optional

from src.models.frames import AckFrame, BeaconFrame, DataFrame, Frame, TrafficClass
from src.models.metrics import LossCause
from src.models.scenario import ScenarioConfig
from src.services.channel import RadioChannel
from src.services.csma import CsmaOutcome
from src.services.engine import Event, EventKernel, EventKind
from src.services.metrics import Delivered, Lost, MetricsCollector
from src.services.queues import EnqueueResult
from src.services.superframe import DeviceScheduleView


_LOSS_BY_OUTCOME = {
    CsmaOutcome.CHANNEL_ACCESS_FAILURE: LossCause.CHANNEL_ACCESS_FAILURE,
    CsmaOutcome.RETRY_FAILURE: LossCause.RETRY_FAILURE,
}


class BaseDevice:
    """End device: frame creation, buffering, beacon tracking and radio state."""

    def __init__(
        self,
        address: int,
        kernel: EventKernel,
        channel: RadioChannel,
        metrics: MetricsCollector,
        config: ScenarioConfig,
    ):
        self.address = address
        self.entity_id = f"device:{address}"
        self.kernel = kernel
        self.channel = channel
        self.metrics = metrics
        self.config = config
        self.queues = None
        self.view: Optional[DeviceScheduleView] = None
        self.beacons_received = 0
        self._seq = 0
        self._radio_on = True
        self._radio_on_since = 0
        self.radio_on_symbols = 0

        kernel.register(self.entity_id, self._on_event)
        channel.attach(address, self.on_receive)

    def next_seq(self) -> int:
        seq = self._seq
        self._seq = (self._seq + 1) & 0xFF
        return seq

    def generate(self, traffic_class: TrafficClass) -> DataFrame:
        """Create a frame stamped with the current time and buffer it."""
        frame = DataFrame(
            src=self.address,
            traffic_class=traffic_class,
            seq=self.next_seq(),
            gen_time=self.kernel.now,
            payload_len=self.config.msdu_bytes,
        )
        self.metrics.record_generation(frame)
        if self.queues.classify_and_enqueue(frame) is EnqueueResult.DROPPED_OVERFLOW:
            self.metrics.record_outcome(frame, Lost(LossCause.QUEUE_OVERFLOW))
        else:
            self.on_enqueued(frame)
        return frame

    def on_receive(self, frame: Frame) -> None:
        if isinstance(frame, AckFrame):
            if frame.dst == self.address:
                self.on_ack(frame)
        elif isinstance(frame, BeaconFrame):
            self.beacons_received += 1
            self.device_on_beacon(frame)

    def set_radio(self, on: bool) -> None:
        """Switch the transceiver; only a listening radio receives frames."""
        if on == self._radio_on:
            return
        now = self.kernel.now
        if self._radio_on:
            self.radio_on_symbols += now - self._radio_on_since
        else:
            self._radio_on_since = now
        self._radio_on = on
        self.channel.set_listening(self.address, on)

    def record_csma_outcome(self, frame: DataFrame, outcome: CsmaOutcome, at: int) -> None:
        if outcome is CsmaOutcome.DELIVERED:
            self.metrics.record_outcome(frame, Delivered(at))
        else:
            self.metrics.record_outcome(frame, Lost(_LOSS_BY_OUTCOME[outcome]))

    def close(self) -> None:
        """Flush transceiver accounting at the end of the run."""
        if self._radio_on:
            self.radio_on_symbols += self.kernel.now - self._radio_on_since
            self._radio_on_since = self.kernel.now

    def _on_event(self, event: Event) -> None:
        if event.kind is EventKind.BEACON_EXPECTED:
            # The old schedule dies with its superframe, received beacon or not
            self.view = None
            self.set_radio(True)
        else:
            self.on_event(event)

    def on_enqueued(self, frame: DataFrame) -> None:
        raise NotImplementedError

    def on_ack(self, ack: AckFrame) -> None:
        raise NotImplementedError

    def device_on_beacon(self, beacon: BeaconFrame) -> DeviceScheduleView:
        raise NotImplementedError

    def on_event(self, event: Event) -> None:
        raise NotImplementedError
