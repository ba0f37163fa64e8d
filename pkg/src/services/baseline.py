"""Plain beacon-enabled IEEE 802.15.4 slotted CSMA/CA device.

Every frame contends in the CAP, which spans the whole active period after
the beacon. Buffers drain in strict burst > periodic > normal order, or
through one shared FIFO when ``csma.baseline_queueing`` is ``single_fifo``.
"""
from typing import Optional

import numpy as np

from src.models.frames import AckFrame, BeaconFrame, DataFrame
from src.models.scenario import BaselineQueueing, ScenarioConfig
from src.services.channel import RadioChannel
from src.services.csma import ContentionWindow, CsmaOutcome, CsmaTransmitter
from src.services.device import BaseDevice
from src.services.engine import Event, EventKernel, EventKind
from src.services.metrics import MetricsCollector
from src.services.queues import FifoQueue, PriorityQueueSet
from src.services.superframe import DeviceScheduleView, SuperframeTiming


class BaselineDevice(BaseDevice):
    """End device that sends every class by slotted CSMA/CA."""

    def __init__(
        self,
        address: int,
        kernel: EventKernel,
        channel: RadioChannel,
        metrics: MetricsCollector,
        config: ScenarioConfig,
        rng: np.random.Generator,
    ):
        super().__init__(address, kernel, channel, metrics, config)
        if config.csma.baseline_queueing is BaselineQueueing.SINGLE_FIFO:
            self.queues = FifoQueue(config.queue_capacity)
        else:
            self.queues = PriorityQueueSet(config.queue_capacity)
        self.tx = CsmaTransmitter(
            f"csma:{address}:cap", address, kernel, channel, config.csma, rng,
            windows=self._window_at, on_complete=self._on_complete,
        )

    def _window_at(self, at: int) -> Optional[ContentionWindow]:
        if self.view is None:
            return None
        window = self.view.cap_window
        if window is None or window.end <= at:
            return None
        return window

    def device_on_beacon(self, beacon: BeaconFrame) -> DeviceScheduleView:
        timing = SuperframeTiming.from_received_beacon(
            self.kernel.now, beacon, self.config.superframe, reserve_request_window=False,
        )
        self.view = DeviceScheduleView(timing=timing, my_gts=None)
        self.kernel.schedule(self.view.next_beacon, self.entity_id, EventKind.BEACON_EXPECTED)
        self.kernel.schedule(timing.active_end, self.entity_id, EventKind.ACTIVE_END)
        self.tx.resume()
        self._kick()
        return self.view

    def on_event(self, event: Event) -> None:
        if event.kind is EventKind.ACTIVE_END:
            self.set_radio(False)

    def on_enqueued(self, frame: DataFrame) -> None:
        self._kick()

    def on_ack(self, ack: AckFrame) -> None:
        self.tx.on_ack(ack)

    def _kick(self) -> None:
        if self.tx.busy:
            return
        frame = self.queues.dequeue_strict()
        if frame is not None:
            self.tx.start_attempt(frame)

    def _on_complete(self, frame: DataFrame, outcome: CsmaOutcome, at: int) -> None:
        self.record_csma_outcome(frame, outcome, at)
        self._kick()
