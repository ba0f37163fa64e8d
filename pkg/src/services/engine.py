"""Deterministic discrete-event kernel on top of ``simpy.Environment``.

Time is an integer count of PHY symbols (16 us each at 2.4 GHz). Every
scheduled event is a simpy timeout of the same priority, so simpy's
``(time, priority, insertion id)`` heap fires events in ``(fire_at, seq)``
order and delivery order never depends on anything but the schedule itself.
"""
import itertools
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Any, Callable, Dict, Hashable, Optional

import numpy as np
import simpy

from src.utils.logging import sim_logger


logger = sim_logger.get_logger(__name__, 'engine')


class EventKind(str, Enum):
    """Event tags understood by the simulation entities."""
    SUPERFRAME_START = "superframe_start"
    TX_END = "tx_end"
    ACK_SEND = "ack_send"
    BEACON_EXPECTED = "beacon_expected"
    GTS_SLOT = "gts_slot"
    GTS_END = "gts_end"
    CAP_START = "cap_start"
    ACTIVE_END = "active_end"
    REQUEST_WINDOW = "request_window"
    CCA = "cca"
    TX_START = "tx_start"
    ACK_TIMEOUT = "ack_timeout"
    GENERATE = "generate"


class EventState(IntEnum):
    PENDING = 0
    FIRED = 1
    CANCELLED = 2


class SchedulingError(RuntimeError):
    """Raised when the event schedule would violate causality."""


@dataclass(slots=True, eq=False)
class Event:
    """A scheduled occurrence; also serves as the cancellation handle."""
    fire_at: int
    seq: int
    target: Hashable
    kind: EventKind
    payload: Any = None
    state: EventState = EventState.PENDING


Handler = Callable[[Event], None]


class EventKernel:
    """Single time-ordered event queue for one simulation run."""

    def __init__(self):
        self.env = simpy.Environment(initial_time=0)
        self._seq = itertools.count()
        self._handlers: Dict[Hashable, Handler] = {}
        self._pending = 0
        self._idle_until: Optional[int] = None
        self.processed: int = 0

    @property
    def now(self) -> int:
        # ``run(until=...)`` may leave a float clock behind
        return int(self.env.now)

    def register(self, entity_id: Hashable, handler: Handler) -> None:
        """Route every event targeted at ``entity_id`` to ``handler``."""
        if entity_id in self._handlers:
            raise SchedulingError(f"entity {entity_id!r} registered twice")
        self._handlers[entity_id] = handler

    def schedule(self, at: int, target: Hashable, kind: EventKind, payload: Any = None) -> Event:
        """
        Enqueue an event.

        Args:
            at: Absolute fire time in symbols, not earlier than ``now``
            target: Registered entity id
            kind: Event tag
            payload: Opaque data handed to the target

        Returns:
            The event, usable as a handle for ``cancel``
        """
        if at < self.now:
            raise SchedulingError(
                f"cannot schedule {kind.value} for {target!r} at {at}: clock is already at {self.now}"
            )
        if target not in self._handlers:
            raise SchedulingError(f"no entity registered as {target!r}")
        event = Event(at, next(self._seq), target, kind, payload)
        timeout = self.env.timeout(at - self.now, value=event)
        timeout.callbacks.append(self._dispatch)
        self._pending += 1
        return event

    def cancel(self, event: Optional[Event]) -> bool:
        """Cancel a pending event; False if it already fired or was cancelled."""
        if event is None or event.state is not EventState.PENDING:
            return False
        event.state = EventState.CANCELLED
        self._pending -= 1
        return True

    def _dispatch(self, timeout: simpy.Timeout) -> None:
        event: Event = timeout.value
        if event.state is not EventState.PENDING:
            return
        if self._idle_until is not None:
            raise SchedulingError(
                f"{event.kind.value} for {event.target!r} is still pending at {event.fire_at}, "
                f"before {self._idle_until}; run it first"
            )
        event.state = EventState.FIRED
        self._pending -= 1
        self.processed += 1
        self._handlers[event.target](event)

    def run_until(self, t_end: int) -> int:
        """
        Process every event with ``fire_at <= t_end``.

        The clock never passes ``t_end``; events beyond the horizon stay
        queued.

        Returns:
            Number of events processed by this call
        """
        env = self.env
        before = self.processed
        while env.peek() <= t_end:
            env.step()
        return self.processed - before

    def advance_to(self, at: int) -> None:
        """Move the idle clock forward, e.g. to the run horizon for final accounting."""
        if at < self.now:
            raise SchedulingError(f"cannot move the clock back from {self.now} to {at}")
        if at == self.now:
            return
        self._idle_until = at
        try:
            # simpy's stop event outranks anything else due exactly at ``at``
            self.env.run(until=at)
        finally:
            self._idle_until = None

    @property
    def pending(self) -> int:
        return self._pending


class StreamPurpose(IntEnum):
    """Independent random streams per entity."""
    PERIODIC = 0
    NORMAL = 1
    BURST = 2
    BACKOFF = 3
    BACKOFF_REQUEST = 4


class RngStreams:
    """Seeded PCG64 sub-streams keyed by (seed, entity, purpose).

    Each stream is ``np.random.Generator(PCG64(SeedSequence(entropy=seed,
    spawn_key=(entity, purpose))))``; adding an entity never perturbs the
    draws of another.
    """

    def __init__(self, seed: int):
        self.seed = seed

    def stream(self, entity: int, purpose: StreamPurpose) -> np.random.Generator:
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(entity, int(purpose)))
        return np.random.Generator(np.random.PCG64(sequence))
