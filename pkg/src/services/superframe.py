"""Superframe geometry derived from a beacon.

Mini-slot 1 starts right after the beacon; the active period then holds
``(SD - beacon) // slot`` whole mini-slots and the trailing partial slot is
unused. The CFP occupies the first ``cfp_mini_slots`` slots, the CAP the
rest. When a request window is reserved, its last ``request_window_slots``
slots carry only GTS requests and data contention ends where it begins.
Scheduled requesters each own one fixed sub-slot of that window.
"""
from dataclasses import dataclass
from typing import Optional

from src.models.frames import BeaconFrame, GtsDescriptor
from src.models.scenario import REQUEST_SLOT_SYMBOLS, SuperframeConfig, airtime_symbols
from src.services import codec
from src.services.csma import ContentionWindow


@dataclass(frozen=True, slots=True)
class SuperframeTiming:
    """Absolute boundaries of one superframe."""
    start: int
    beacon_symbols: int
    cfp_slots: int
    slot_symbols: int
    superframe_symbols: int
    beacon_interval_symbols: int
    request_window_slots: int = 0

    @classmethod
    def from_beacon(
        cls,
        start: int,
        beacon: BeaconFrame,
        config: SuperframeConfig,
        reserve_request_window: bool = True,
    ) -> "SuperframeTiming":
        return cls(
            start=start,
            beacon_symbols=airtime_symbols(codec.encoded_length(beacon)),
            cfp_slots=beacon.superframe_spec.cfp_mini_slots,
            slot_symbols=config.mini_slot_symbols,
            superframe_symbols=config.superframe_symbols,
            beacon_interval_symbols=config.beacon_interval_symbols,
            request_window_slots=config.request_window_slots if reserve_request_window else 0,
        )

    @classmethod
    def from_received_beacon(
        cls,
        received_at: int,
        beacon: BeaconFrame,
        config: SuperframeConfig,
        reserve_request_window: bool = True,
    ) -> "SuperframeTiming":
        """Timing seen by a device whose radio finished receiving ``beacon`` at ``received_at``."""
        start = received_at - airtime_symbols(codec.encoded_length(beacon))
        return cls.from_beacon(start, beacon, config, reserve_request_window)

    @property
    def beacon_end(self) -> int:
        return self.start + self.beacon_symbols

    @property
    def usable_slots(self) -> int:
        return (self.superframe_symbols - self.beacon_symbols) // self.slot_symbols

    def slot_start(self, slot: int) -> int:
        """Start of 1-indexed mini-slot ``slot``."""
        return self.beacon_end + (slot - 1) * self.slot_symbols

    @property
    def cfp_end(self) -> int:
        return self.slot_start(self.cfp_slots + 1)

    @property
    def active_end(self) -> int:
        return self.slot_start(self.usable_slots + 1)

    @property
    def request_window_start(self) -> int:
        return self.slot_start(self.usable_slots - self.request_window_slots + 1)

    @property
    def data_window(self) -> Optional[ContentionWindow]:
        if self.cfp_end >= self.request_window_start:
            return None
        return ContentionWindow(self.cfp_end, self.request_window_start)

    @property
    def request_window(self) -> Optional[ContentionWindow]:
        if not self.request_window_slots:
            return None
        return ContentionWindow(self.request_window_start, self.active_end)

    def request_slot_start(self, index: int) -> Optional[int]:
        """Start of the 0-indexed dedicated request sub-slot, or None when it does not fit."""
        if not self.request_window_slots or index < 0:
            return None
        start = self.request_window_start + index * REQUEST_SLOT_SYMBOLS
        if start + REQUEST_SLOT_SYMBOLS > self.active_end:
            return None
        return start

    @property
    def next_beacon(self) -> int:
        return self.start + self.beacon_interval_symbols

    def period_at(self, at: int) -> str:
        if at < self.beacon_end:
            return "beacon"
        if at < self.cfp_end:
            return "cfp"
        if at < self.start + self.superframe_symbols:
            return "cap"
        return "inactive"


@dataclass(frozen=True, slots=True)
class DeviceScheduleView:
    """What a device knows about the current superframe from its last beacon."""
    timing: SuperframeTiming
    my_gts: Optional[GtsDescriptor]

    @property
    def cfp_end_slot(self) -> int:
        return self.timing.cfp_slots

    @property
    def cap_window(self) -> Optional[ContentionWindow]:
        return self.timing.data_window

    @property
    def next_beacon(self) -> int:
        return self.timing.next_beacon

    @property
    def gts_window(self) -> Optional[ContentionWindow]:
        if self.my_gts is None:
            return None
        return ContentionWindow(
            self.timing.slot_start(self.my_gts.start_slot),
            self.timing.slot_start(self.my_gts.end_slot + 1),
        )
