"""Per-device three-class FIFO buffers.

Burst and periodic frames are served in the CFP (burst first); normal frames
are served in the CAP. Each queue is bounded and tail-drops on overflow.
"""
from collections import Counter, deque
from enum import Enum
from typing import Deque, Dict, NamedTuple, Optional

from src.models.frames import DataFrame, TrafficClass


class EnqueueResult(str, Enum):
    ACCEPTED = "accepted"
    DROPPED_OVERFLOW = "dropped_overflow"


class PendingCounts(NamedTuple):
    burst: int
    periodic: int

    @property
    def total(self) -> int:
        return self.burst + self.periodic


class PriorityQueueSet:
    """Bounded burst / periodic / normal FIFO queues of one device."""

    def __init__(self, capacity: int = 10, realtime_cap_fallback: bool = False):
        if capacity < 1:
            raise ValueError("queue capacity must be at least 1")
        self.capacity = capacity
        self.realtime_cap_fallback = realtime_cap_fallback
        self.queues: Dict[TrafficClass, Deque[DataFrame]] = {
            traffic_class: deque() for traffic_class in TrafficClass
        }
        self.accepted: Counter = Counter()
        self.dropped: Counter = Counter()

    def classify_and_enqueue(self, frame: DataFrame) -> EnqueueResult:
        """Append the frame to its class queue, or tail-drop it when full."""
        queue = self.queues[frame.traffic_class]
        if len(queue) >= self.capacity:
            self.dropped[frame.traffic_class] += 1
            return EnqueueResult.DROPPED_OVERFLOW
        queue.append(frame)
        self.accepted[frame.traffic_class] += 1
        return EnqueueResult.ACCEPTED

    def dequeue_cfp(self) -> Optional[DataFrame]:
        """Head of the burst queue, else of the periodic queue; never normal."""
        for traffic_class in (TrafficClass.BURST, TrafficClass.PERIODIC):
            queue = self.queues[traffic_class]
            if queue:
                return queue.popleft()
        return None

    def dequeue_cap(self) -> Optional[DataFrame]:
        """Head of the normal queue.

        With ``realtime_cap_fallback`` real-time frames still waiting are
        served first, in burst-periodic order.
        """
        if self.realtime_cap_fallback:
            return self.dequeue_strict()
        queue = self.queues[TrafficClass.NORMAL]
        return queue.popleft() if queue else None

    def dequeue_strict(self) -> Optional[DataFrame]:
        """Strict priority over all three classes."""
        for traffic_class in TrafficClass:
            queue = self.queues[traffic_class]
            if queue:
                return queue.popleft()
        return None

    def requeue_front(self, frame: DataFrame) -> None:
        """Return an unacknowledged frame to the head of its class queue.

        The frame already holds a buffer slot, so capacity is not re-checked.
        """
        self.queues[frame.traffic_class].appendleft(frame)

    def pending_counts(self) -> PendingCounts:
        return PendingCounts(
            burst=len(self.queues[TrafficClass.BURST]),
            periodic=len(self.queues[TrafficClass.PERIODIC]),
        )

    def has_cap_traffic(self) -> bool:
        if self.realtime_cap_fallback:
            return any(self.queues.values())
        return bool(self.queues[TrafficClass.NORMAL])

    def __len__(self) -> int:
        return sum(len(queue) for queue in self.queues.values())

    def drain(self):
        """Remove and yield every buffered frame (end-of-run accounting)."""
        for queue in self.queues.values():
            while queue:
                yield queue.popleft()


class FifoQueue:
    """Single bounded FIFO; the alternative baseline buffer discipline."""

    def __init__(self, capacity: int = 10):
        if capacity < 1:
            raise ValueError("queue capacity must be at least 1")
        self.capacity = capacity
        self.queue: Deque[DataFrame] = deque()
        self.accepted: Counter = Counter()
        self.dropped: Counter = Counter()

    def classify_and_enqueue(self, frame: DataFrame) -> EnqueueResult:
        if len(self.queue) >= self.capacity:
            self.dropped[frame.traffic_class] += 1
            return EnqueueResult.DROPPED_OVERFLOW
        self.queue.append(frame)
        self.accepted[frame.traffic_class] += 1
        return EnqueueResult.ACCEPTED

    def dequeue_strict(self) -> Optional[DataFrame]:
        return self.queue.popleft() if self.queue else None

    def requeue_front(self, frame: DataFrame) -> None:
        self.queue.appendleft(frame)

    def __len__(self) -> int:
        return len(self.queue)

    def drain(self):
        while self.queue:
            yield self.queue.popleft()
