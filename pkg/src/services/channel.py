"""Single-hop broadcast medium with collision destruction and carrier sensing.

Every node hears every other node, propagation delay is zero and there is no
capture: any overlap in time destroys all overlapping frames at every
receiver. Busy intervals are half-open, ``[start, start + duration)``.
"""
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional

from src.models.frames import Frame
from src.models.metrics import ChannelStats
from src.models.scenario import airtime_symbols
from src.services import codec
from src.services.engine import Event, EventKernel, EventKind
from src.utils.logging import sim_logger


logger = sim_logger.get_logger(__name__, 'channel')

CHANNEL_ID = "channel"

Receiver = Callable[[Frame], None]
PeriodClassifier = Callable[[int], str]


class ChannelError(RuntimeError):
    """A node misused the medium (e.g. started two transmissions at once)."""


class CcaResult(str, Enum):
    CLEAR = "clear"
    BUSY = "busy"


@dataclass(slots=True, eq=False)
class Transmission:
    """One frame on the air."""
    sender: int
    frame: Frame
    wire: bytes
    start: int
    duration: int
    period: str
    collided: bool = False

    @property
    def end(self) -> int:
        return self.start + self.duration

    def covers(self, at: int) -> bool:
        return self.start <= at < self.end


class RadioChannel:
    """Idealized shared medium of one PAN."""

    def __init__(self, kernel: EventKernel, period_of: Optional[PeriodClassifier] = None):
        self.kernel = kernel
        self.period_of: PeriodClassifier = period_of or (lambda at: "cap")
        self.active: List[Transmission] = []
        self._receivers: Dict[int, Receiver] = {}
        self._listening: Dict[int, bool] = {}
        self.transmissions = 0
        self.delivered = 0
        self.collisions: Counter = Counter()
        kernel.register(CHANNEL_ID, self._on_event)

    def attach(self, address: int, receiver: Receiver) -> None:
        """Register a node's receive callback; nodes start listening."""
        self._receivers[address] = receiver
        self._listening[address] = True

    def set_listening(self, address: int, listening: bool) -> None:
        self._listening[address] = listening

    def begin_transmit(self, sender: int, frame: Frame) -> int:
        """
        Put a frame on the air starting now.

        Args:
            sender: Short address of the transmitting node
            frame: Frame to send

        Returns:
            Completion time in symbols
        """
        now = self.kernel.now
        for other in self.active:
            if other.sender == sender and other.end > now:
                raise ChannelError(f"node 0x{sender:04x} is already transmitting until {other.end}")

        wire = codec.encode(frame)
        tx = Transmission(
            sender=sender, frame=frame, wire=wire, start=now,
            duration=airtime_symbols(len(wire)), period=self.period_of(now),
        )
        for other in self.active:
            if other.end > now:
                other.collided = True
                tx.collided = True
        if tx.collided and tx.period == "cfp":
            logger.warning("Overlapping transmission inside the CFP", extra={
                'component': 'channel',
                'operation': 'begin_transmit',
                'sender': sender,
                'at': now,
                'duration_ms': 0,
                'status': 'schedule_violation'
            })

        self.active.append(tx)
        self.transmissions += 1
        self.kernel.schedule(tx.end, CHANNEL_ID, EventKind.TX_END, tx)
        return tx.end

    def cca(self, sampler: int, at: Optional[int] = None) -> CcaResult:
        """Point-sample the medium; busy iff a transmission interval contains ``at``."""
        at = self.kernel.now if at is None else at
        for tx in self.active:
            if tx.covers(at):
                return CcaResult.BUSY
        return CcaResult.CLEAR

    def is_transmitting(self, address: int) -> bool:
        now = self.kernel.now
        return any(tx.sender == address and tx.end > now for tx in self.active)

    def _on_event(self, event: Event) -> None:
        tx: Transmission = event.payload
        self.active.remove(tx)
        if tx.collided:
            self.collisions[tx.period] += 1
            return

        try:
            frame = codec.decode(tx.wire)
        except codec.DecodeError as exc:
            logger.debug(f"Dropping undecodable frame: {exc}", extra={
                'component': 'channel',
                'operation': 'deliver',
                'sender': tx.sender,
                'duration_ms': 0,
                'status': 'decode_error'
            })
            return

        self.delivered += 1
        for address, receiver in self._receivers.items():
            if address != tx.sender and self._listening[address]:
                receiver(frame)

    def stats(self) -> ChannelStats:
        return ChannelStats(
            transmissions=self.transmissions,
            delivered=self.delivered,
            collisions_by_period=dict(sorted(self.collisions.items())),
        )
