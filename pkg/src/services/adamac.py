"""Ada-MAC: beacon-enabled PAN with adaptive mini-slot GTS allocation.

The coordinator beacons every BI, grants CFP mini-slots from the requests it
collected in the previous request window, and acknowledges every data frame
and request addressed to it. Devices send burst and periodic frames in the
GTSs they own and normal frames by slotted CSMA/CA in the CAP. GTS requests
go out in the request window at the end of the CAP, each device in its own
sub-slot (or by CSMA/CA when ``request_access`` is ``csma``).
"""
from collections import Counter
from typing import List, Optional

import numpy as np

from src.models.frames import (
    COORDINATOR_ADDRESS, MAX_MINI_SLOTS, AckFrame, BeaconFrame, DataFrame, Frame, GtsRequestFrame, SuperframeSpec,
)
from src.models.scenario import (
    ACK_WAIT_SYMBOLS, TURNAROUND_SYMBOLS, RequestAccess, ScenarioConfig, airtime_symbols,
)
from src.services import codec
from src.services.allocator import GtsSchedule, RequestTable, allocate
from src.services.channel import RadioChannel
from src.services.csma import ContentionWindow, CsmaOutcome, CsmaTransmitter, describe_frame
from src.services.device import BaseDevice
from src.services.engine import Event, EventKernel, EventKind
from src.services.metrics import Delivered, MetricsCollector
from src.services.queues import PriorityQueueSet
from src.services.superframe import DeviceScheduleView, SuperframeTiming
from src.utils.logging import sim_logger


logger = sim_logger.get_logger(__name__, 'adamac')

COORDINATOR_ID = "coordinator"


class PanCoordinator:
    """PAN coordinator at short address 0x0000.

    With ``allocation_enabled`` off it only beacons and acknowledges, which
    is the coordinator of the plain slotted CSMA/CA baseline.
    """

    def __init__(
        self,
        kernel: EventKernel,
        channel: RadioChannel,
        config: ScenarioConfig,
        allocation_enabled: bool = True,
    ):
        self.kernel = kernel
        self.channel = channel
        self.config = config
        self.allocation_enabled = allocation_enabled
        self.address = COORDINATOR_ADDRESS
        self.requests = RequestTable()
        self.timing: Optional[SuperframeTiming] = None
        self.last_schedule = GtsSchedule()
        self.beacon_times: List[int] = []
        self.received: Counter = Counter()
        self.acks_skipped = 0
        self._beacon_seq = 0

        kernel.register(COORDINATOR_ID, self._on_event)
        channel.attach(self.address, self.on_receive)
        channel.period_of = self.period_at

    def start(self, at: int = 0) -> None:
        self.kernel.schedule(at, COORDINATOR_ID, EventKind.SUPERFRAME_START)

    def period_at(self, at: int) -> str:
        if self.timing is None:
            return "beacon"
        return self.timing.period_at(at)

    def _on_event(self, event: Event) -> None:
        if event.kind is EventKind.SUPERFRAME_START:
            self.coordinator_on_superframe_start()
        elif event.kind is EventKind.ACK_SEND:
            self._send_ack(event.payload)

    def coordinator_on_superframe_start(self) -> BeaconFrame:
        """Allocate from the collected requests, broadcast the beacon and start a new table."""
        now = self.kernel.now
        superframe = self.config.superframe
        if self.allocation_enabled:
            schedule = allocate(self.requests, max_slot=self.cfp_limit(len(self.requests)))
        else:
            schedule = GtsSchedule()

        beacon = BeaconFrame(
            superframe_spec=SuperframeSpec(
                beacon_order=superframe.beacon_order,
                superframe_order=superframe.superframe_order,
                cfp_mini_slots=schedule.cfp_length_mini_slots,
                cap_start_mini_slot=schedule.cfp_length_mini_slots,
            ),
            gts_list=schedule.entries[:MAX_MINI_SLOTS],
            beacon_seq=self._beacon_seq,
            src=self.address,
        )
        self.timing = SuperframeTiming.from_beacon(now, beacon, superframe, self.allocation_enabled)
        self.last_schedule = schedule
        self.requests.clear()
        self._beacon_seq = (self._beacon_seq + 1) & 0xFF
        self.beacon_times.append(now)

        if schedule.entries:
            logger.debug(f"Beacon at {now}: CFP of {schedule.cfp_length_mini_slots} mini-slots, "
                         f"{len(schedule.granted)}/{len(schedule.entries)} requests granted", extra={
                'component': 'adamac',
                'operation': 'superframe_start',
                'duration_ms': 0,
                'status': 'allocated'
            })

        self.channel.begin_transmit(self.address, beacon)
        self.kernel.schedule(now + superframe.beacon_interval_symbols, COORDINATOR_ID, EventKind.SUPERFRAME_START)
        return beacon

    def cfp_limit(self, n_descriptors: int) -> int:
        """Last mini-slot a grant may reach when the beacon carries ``n_descriptors`` GTS descriptors."""
        superframe = self.config.superframe
        bare = BeaconFrame(
            superframe_spec=SuperframeSpec(
                beacon_order=superframe.beacon_order,
                superframe_order=superframe.superframe_order,
                cfp_mini_slots=0,
                cap_start_mini_slot=0,
            ),
            src=self.address,
        )
        beacon_bytes = codec.encoded_length(bare) + min(n_descriptors, MAX_MINI_SLOTS) * codec.DESCRIPTOR_BYTES
        usable = (superframe.superframe_symbols - airtime_symbols(beacon_bytes)) // superframe.mini_slot_symbols
        # The request window must survive a long beacon
        return max(1, min(superframe.max_cfp_mini_slots, usable - superframe.request_window_slots))

    def on_receive(self, frame: Frame) -> None:
        if isinstance(frame, DataFrame):
            if frame.dst != self.address:
                return
            self.received[(self.period_at(self.kernel.now - 1), frame.traffic_class.value)] += 1
            self._schedule_ack(frame.seq, frame.src)
        elif isinstance(frame, GtsRequestFrame):
            self.received[(self.period_at(self.kernel.now - 1), "gts_request")] += 1
            self.requests.submit(frame)
            self._schedule_ack(frame.seq, frame.mac_address)

    def _schedule_ack(self, seq: int, dst: int) -> None:
        ack = AckFrame(seq=seq, src=self.address, dst=dst)
        self.kernel.schedule(self.kernel.now + TURNAROUND_SYMBOLS, COORDINATOR_ID, EventKind.ACK_SEND, ack)

    def _send_ack(self, ack: AckFrame) -> None:
        if self.channel.is_transmitting(self.address):
            self.acks_skipped += 1
            return
        self.channel.begin_transmit(self.address, ack)


class AdaMacDevice(BaseDevice):
    """End device running the Ada-MAC access rules."""

    def __init__(
        self,
        address: int,
        kernel: EventKernel,
        channel: RadioChannel,
        metrics: MetricsCollector,
        config: ScenarioConfig,
        data_rng: np.random.Generator,
        request_rng: np.random.Generator,
    ):
        super().__init__(address, kernel, channel, metrics, config)
        self.queues = PriorityQueueSet(config.queue_capacity, config.realtime_cap_fallback)
        self.cap_tx = CsmaTransmitter(
            f"csma:{address}:cap", address, kernel, channel, config.csma, data_rng,
            windows=self._cap_window_at, on_complete=self._on_cap_complete,
        )
        self.request_tx: Optional[CsmaTransmitter] = None
        if config.superframe.request_access is RequestAccess.CSMA:
            self.request_tx = CsmaTransmitter(
                f"csma:{address}:request", address, kernel, channel, config.csma, request_rng,
                windows=self._request_window_at, on_complete=self._on_request_complete,
            )
        self.gts_sent = 0
        self.gts_acked = 0
        self.requests_sent = 0
        self.requests_acked = 0
        self._gts_frame: Optional[DataFrame] = None
        self._gts_timer: Optional[Event] = None
        self._request_frame: Optional[GtsRequestFrame] = None
        self._request_timer: Optional[Event] = None

    # Windows handed to the CSMA/CA engines

    def _cap_window_at(self, at: int) -> Optional[ContentionWindow]:
        if self.view is None:
            return None
        window = self.view.cap_window
        if window is None or window.end <= at:
            return None
        return window

    def _request_window_at(self, at: int) -> Optional[ContentionWindow]:
        if self.view is None:
            return None
        window = self.view.timing.request_window
        if window is None or window.end <= at:
            return None
        return window

    def request_time(self, timing: SuperframeTiming) -> Optional[int]:
        """When this device sends its GTS request in the superframe described by ``timing``."""
        if self.request_tx is not None:
            return timing.request_window_start
        return timing.request_slot_start(self.address - 1)

    # Beacon handling

    def device_on_beacon(self, beacon: BeaconFrame) -> DeviceScheduleView:
        """Adopt the superframe announced by ``beacon`` and plan this device's activity in it."""
        timing = SuperframeTiming.from_received_beacon(self.kernel.now, beacon, self.config.superframe)
        descriptor = beacon.descriptor_for(self.address)
        my_gts = descriptor if descriptor is not None and descriptor.granted else None
        view = DeviceScheduleView(timing=timing, my_gts=my_gts)
        self.view = view

        # A request still contending belongs to the window that just closed
        if self.request_tx is not None and self.request_tx.busy:
            self.request_tx.abort()

        kernel, entity = self.kernel, self.entity_id
        kernel.schedule(view.next_beacon, entity, EventKind.BEACON_EXPECTED)
        self.set_radio(False)
        if my_gts is not None:
            for slot in range(my_gts.start_slot, my_gts.end_slot + 1):
                kernel.schedule(timing.slot_start(slot), entity, EventKind.GTS_SLOT, slot)
            kernel.schedule(timing.slot_start(my_gts.end_slot + 1), entity, EventKind.GTS_END)
        kernel.schedule(timing.cfp_end, entity, EventKind.CAP_START)
        request_at = self.request_time(timing)
        if request_at is not None:
            kernel.schedule(request_at, entity, EventKind.REQUEST_WINDOW)
        kernel.schedule(timing.active_end, entity, EventKind.ACTIVE_END)

        self.cap_tx.resume()
        self._kick_cap()
        return view

    def on_event(self, event: Event) -> None:
        kind = event.kind
        if kind is EventKind.GTS_SLOT:
            self._on_gts_slot(event.payload)
        elif kind is EventKind.ACK_TIMEOUT:
            if isinstance(event.payload, GtsRequestFrame):
                self._on_request_ack_timeout(event.payload)
            else:
                self._on_gts_ack_timeout(event.payload)
        elif kind is EventKind.GTS_END:
            self.set_radio(False)
        elif kind is EventKind.CAP_START:
            self.set_radio(True)
        elif kind is EventKind.REQUEST_WINDOW:
            self.device_end_of_superframe()
        elif kind is EventKind.ACTIVE_END:
            self.set_radio(False)

    # Contention-free period

    def _on_gts_slot(self, slot: int) -> None:
        view = self.view
        if view is None or view.my_gts is None:
            return
        self.set_radio(True)
        frame = self.queues.dequeue_cfp()
        if frame is None:
            return
        slot_end = view.timing.slot_start(slot + 1)
        tx_end = self.channel.begin_transmit(self.address, frame)
        assert tx_end + ACK_WAIT_SYMBOLS <= slot_end, f"GTS exchange overruns mini-slot {slot}"
        self.gts_sent += 1
        self._gts_frame = frame
        self._gts_timer = self.kernel.schedule(tx_end + ACK_WAIT_SYMBOLS, self.entity_id, EventKind.ACK_TIMEOUT, frame)

    def _on_gts_ack_timeout(self, frame: DataFrame) -> None:
        if self._gts_frame is not frame:
            return
        self._gts_frame = None
        self._gts_timer = None
        self.queues.requeue_front(frame)

    # Contention access period

    def on_enqueued(self, frame: DataFrame) -> None:
        # Real-time frames wait for a GTS unless CAP fallback is on
        if frame.traffic_class.is_realtime and not self.queues.realtime_cap_fallback:
            return
        self._kick_cap()

    def _kick_cap(self) -> None:
        if self.cap_tx.busy:
            return
        frame = self.queues.dequeue_cap()
        if frame is not None:
            self.cap_tx.start_attempt(frame)

    def _on_cap_complete(self, frame: DataFrame, outcome: CsmaOutcome, at: int) -> None:
        self.record_csma_outcome(frame, outcome, at)
        self._kick_cap()

    def on_ack(self, ack: AckFrame) -> None:
        frame = self._gts_frame
        if frame is not None and ack.seq == frame.seq:
            self.kernel.cancel(self._gts_timer)
            self._gts_frame = None
            self._gts_timer = None
            self.gts_acked += 1
            self.metrics.record_outcome(frame, Delivered(self.kernel.now))
            return
        request = self._request_frame
        if request is not None and ack.seq == request.seq:
            self.kernel.cancel(self._request_timer)
            self._request_frame = None
            self._request_timer = None
            self.requests_acked += 1
            return
        if self.cap_tx.on_ack(ack):
            return
        if self.request_tx is not None:
            self.request_tx.on_ack(ack)

    # GTS requests

    def device_end_of_superframe(self) -> Optional[GtsRequestFrame]:
        """
        Report the real-time backlog to the coordinator for the next CFP.

        Sent once per superframe from this device's request sub-slot; the
        coordinator allocates from whatever it holds at the next beacon.

        Returns:
            The request put on the air (or into CSMA/CA), None when nothing is requested
        """
        if self.view is None:
            return None
        if self.request_tx is not None and self.request_tx.busy:
            return None
        counts = self.queues.pending_counts()
        if counts.total == 0 and not self.config.allocator.request_all_nodes:
            return None
        request = GtsRequestFrame(
            mac_address=self.address,
            length=max(1, min(counts.total, self.config.allocator.per_node_cap_slots)),
            burst=min(counts.burst, 0xFF),
            periodic=min(counts.periodic, 0xFF),
            seq=self.next_seq(),
        )
        self.requests_sent += 1
        if self.request_tx is not None:
            self.request_tx.start_attempt(request)
            return request

        self.set_radio(True)
        tx_end = self.channel.begin_transmit(self.address, request)
        self._request_frame = request
        self._request_timer = self.kernel.schedule(
            tx_end + ACK_WAIT_SYMBOLS, self.entity_id, EventKind.ACK_TIMEOUT, request,
        )
        return request

    def _on_request_ack_timeout(self, request: GtsRequestFrame) -> None:
        if self._request_frame is not request:
            return
        self._request_frame = None
        self._request_timer = None
        self._log_lost_request(request, "no_ack")

    def _on_request_complete(self, request: GtsRequestFrame, outcome: CsmaOutcome, at: int) -> None:
        if outcome is CsmaOutcome.DELIVERED:
            self.requests_acked += 1
            return
        self._log_lost_request(request, outcome.value)
        # Try again while the window is still open
        if self._request_window_at(at) is not None:
            self.device_end_of_superframe()

    def _log_lost_request(self, request: GtsRequestFrame, status: str) -> None:
        logger.debug(f"device {self.address} lost {describe_frame(request)}: {status}", extra={
            'component': 'adamac',
            'operation': 'gts_request',
            'duration_ms': 0,
            'status': status
        })
