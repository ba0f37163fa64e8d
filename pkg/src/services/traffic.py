"""Per-device application traffic.

Periodic and normal frames follow Poisson processes (exponential gaps) by
default; periodic frames can also come at a fixed interval with a random
phase. Burst frames come from an independent Bernoulli(p_burst) trial at
every tick of a global grid (mini-slot or backoff period), realized as
geometric gaps between successful ticks.
"""
from typing import Optional

import numpy as np

from src.models.frames import TrafficClass
from src.models.scenario import (
    BACKOFF_PERIOD_SYMBOLS, BurstTickBase, PeriodicMode, TrafficProfile, seconds_to_symbols,
)
from src.services.device import BaseDevice
from src.services.engine import Event, EventKernel, EventKind, RngStreams, StreamPurpose


def burst_tick_symbols(profile: TrafficProfile, mini_slot_symbols: int) -> int:
    if profile.burst_tick_base is BurstTickBase.BACKOFF_PERIOD:
        return BACKOFF_PERIOD_SYMBOLS
    return mini_slot_symbols


class TrafficSource:
    """Feeds one device with frames of all three classes."""

    def __init__(
        self,
        device: BaseDevice,
        profile: TrafficProfile,
        streams: RngStreams,
        kernel: EventKernel,
        tick_symbols: int,
    ):
        self.device = device
        self.profile = profile
        self.kernel = kernel
        self.tick_symbols = tick_symbols
        self.entity_id = f"traffic:{device.address}"
        self.periodic_rng = streams.stream(device.address, StreamPurpose.PERIODIC)
        self.normal_rng = streams.stream(device.address, StreamPurpose.NORMAL)
        self.burst_rng = streams.stream(device.address, StreamPurpose.BURST)
        self.periodic_symbols = seconds_to_symbols(profile.periodic_interval_s)
        self.normal_symbols = seconds_to_symbols(profile.normal_interval_s)
        self._burst_tick = 0
        kernel.register(self.entity_id, self._on_event)

    def start(self) -> None:
        """Schedule the first arrival of every class."""
        if self.profile.periodic_mode is PeriodicMode.DETERMINISTIC:
            phase = int(self.periodic_rng.integers(0, max(1, self.periodic_symbols)))
            self._schedule(self.kernel.now + phase, TrafficClass.PERIODIC)
        else:
            self._schedule_next(TrafficClass.PERIODIC)
        self._schedule_next(TrafficClass.NORMAL)
        self._schedule_next(TrafficClass.BURST)

    def _schedule(self, at: int, traffic_class: TrafficClass) -> None:
        self.kernel.schedule(at, self.entity_id, EventKind.GENERATE, traffic_class)

    def next_gap(self, traffic_class: TrafficClass) -> Optional[int]:
        """Symbols until the next arrival of ``traffic_class``; None when the class is silent."""
        if traffic_class is TrafficClass.PERIODIC:
            if self.profile.periodic_mode is PeriodicMode.DETERMINISTIC:
                return max(1, self.periodic_symbols)
            return _exponential_gap(self.periodic_rng, self.profile.periodic_interval_s)
        if traffic_class is TrafficClass.NORMAL:
            return _exponential_gap(self.normal_rng, self.profile.normal_interval_s)
        if self.profile.p_burst <= 0.0:
            return None
        ticks = int(self.burst_rng.geometric(self.profile.p_burst))
        target_tick = self._burst_tick + ticks
        gap = target_tick * self.tick_symbols - self.kernel.now
        self._burst_tick = target_tick
        return gap

    def _schedule_next(self, traffic_class: TrafficClass) -> None:
        gap = self.next_gap(traffic_class)
        if gap is not None:
            self._schedule(self.kernel.now + gap, traffic_class)

    def _on_event(self, event: Event) -> None:
        traffic_class: TrafficClass = event.payload
        self.device.generate(traffic_class)
        self._schedule_next(traffic_class)


def _exponential_gap(rng: np.random.Generator, mean_s: float) -> int:
    # Arrivals need a strictly positive gap to stay ordered on the integer clock
    return max(1, seconds_to_symbols(rng.exponential(mean_s)))
