"""Slotted CSMA/CA transmitter state machine.

Backoff periods are 20 symbols long and aligned to the start of the
contention window. A transmission needs CW=2 consecutive clear CCAs on
successive boundaries; each CCA is sampled at the end of its 8-symbol
window. When the remaining backoff, both CCAs, the frame and the ACK wait do
not fit before the window closes, the countdown pauses and carries over to
the next window.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np

from src.models.frames import AckFrame, DataFrame, GtsRequestFrame
from src.models.scenario import ACK_WAIT_SYMBOLS, BACKOFF_PERIOD_SYMBOLS, CsmaParameters, airtime_symbols
from src.services import codec
from src.services.channel import CcaResult, RadioChannel
from src.services.engine import Event, EventKernel, EventKind
from src.utils.logging import sim_logger


logger = sim_logger.get_logger(__name__, 'csma')

CCA_SYMBOLS = 8
CONTENTION_WINDOW = 2


class ContentionWindow(NamedTuple):
    """Half-open interval ``[start, end)`` in which the transmitter may contend."""
    start: int
    end: int


WindowSource = Callable[[int], Optional[ContentionWindow]]


class CsmaOutcome(str, Enum):
    DELIVERED = "delivered"
    CHANNEL_ACCESS_FAILURE = "channel_access_failure"
    RETRY_FAILURE = "retry_failure"


class CsmaState(str, Enum):
    IDLE = "idle"
    BACKOFF = "backoff"
    PAUSED = "paused"
    CCA = "cca"
    TRANSMITTING = "transmitting"
    AWAIT_ACK = "await_ack"


@dataclass(slots=True)
class CsmaAttempt:
    """Per-frame CSMA/CA variables."""
    frame: object
    nb: int
    be: int
    cw: int = CONTENTION_WINDOW
    retries: int = 0
    remaining_backoff: int = 0


CompletionHandler = Callable[[object, CsmaOutcome, int], None]


class CsmaTransmitter:
    """One device's slotted CSMA/CA engine for a single contention window kind."""

    def __init__(
        self,
        entity_id: str,
        address: int,
        kernel: EventKernel,
        channel: RadioChannel,
        params: CsmaParameters,
        rng: np.random.Generator,
        windows: WindowSource,
        on_complete: CompletionHandler,
    ):
        self.entity_id = entity_id
        self.address = address
        self.kernel = kernel
        self.channel = channel
        self.params = params
        self.rng = rng
        self.windows = windows
        self.on_complete = on_complete

        self.state = CsmaState.IDLE
        self.attempt: Optional[CsmaAttempt] = None
        self._window: Optional[ContentionWindow] = None
        self._boundary = 0
        self._timer: Optional[Event] = None
        self.stats: Counter = Counter()

        kernel.register(entity_id, self._on_event)

    @property
    def busy(self) -> bool:
        return self.state is not CsmaState.IDLE

    def start_attempt(self, frame) -> None:
        """Begin contending for ``frame``: NB=0, BE=MinBE, CW=2."""
        if self.busy:
            raise RuntimeError(f"{self.entity_id} is already sending a frame")
        self.attempt = CsmaAttempt(frame=frame, nb=0, be=self.params.min_be)
        self.stats["attempts"] += 1
        self._new_backoff(self.kernel.now)

    def resume(self) -> None:
        """Continue a countdown paused for lack of a known contention window."""
        if self.state is CsmaState.PAUSED:
            self._proceed(self.kernel.now)

    def abort(self):
        """Abandon the current frame without reporting an outcome; returns it."""
        if not self.busy:
            return None
        frame = self.attempt.frame
        self.kernel.cancel(self._timer)
        self._timer = None
        self.attempt = None
        self._window = None
        self.state = CsmaState.IDLE
        self.stats["aborted"] += 1
        return frame

    def on_ack(self, ack: AckFrame) -> bool:
        """Complete the pending transfer when the ACK matches it; stale ACKs are ignored."""
        if self.state is not CsmaState.AWAIT_ACK or ack.dst != self.address:
            return False
        if ack.seq != self.attempt.frame.seq:
            return False
        self.kernel.cancel(self._timer)
        self._timer = None
        self.stats["delivered"] += 1
        self._finish(CsmaOutcome.DELIVERED)
        return True

    def _new_backoff(self, from_time: int) -> None:
        attempt = self.attempt
        assert self.params.min_be <= attempt.be <= self.params.max_be, f"BE {attempt.be} out of range"
        assert attempt.nb <= self.params.max_nb, f"NB {attempt.nb} above MaxNB"
        periods = int(self.rng.integers(0, 2 ** attempt.be))
        assert 0 <= periods <= 2 ** attempt.be - 1, f"backoff {periods} outside [0, 2^{attempt.be}-1]"
        self.stats["backoff_draws"] += 1
        attempt.remaining_backoff = periods
        attempt.cw = CONTENTION_WINDOW
        self._proceed(from_time)

    def _exchange_symbols(self) -> int:
        frame = self.attempt.frame
        return CONTENTION_WINDOW * BACKOFF_PERIOD_SYMBOLS + airtime_symbols(codec.encoded_length(frame)) + ACK_WAIT_SYMBOLS

    def _proceed(self, at: int) -> None:
        attempt = self.attempt
        exchange = self._exchange_symbols()
        while True:
            window = self.windows(at)
            if window is None or window.end <= at:
                self.state = CsmaState.PAUSED
                self._window = None
                return
            origin = max(at, window.start)
            offset = (origin - window.start) % BACKOFF_PERIOD_SYMBOLS
            boundary = origin if offset == 0 else origin + BACKOFF_PERIOD_SYMBOLS - offset
            cca_at = boundary + attempt.remaining_backoff * BACKOFF_PERIOD_SYMBOLS
            if cca_at + exchange <= window.end:
                break
            available = max(0, (window.end - boundary) // BACKOFF_PERIOD_SYMBOLS)
            attempt.remaining_backoff -= min(attempt.remaining_backoff, available)
            at = window.end

        attempt.remaining_backoff = 0
        self._window = window
        self._boundary = cca_at
        self.state = CsmaState.BACKOFF
        self._timer = self.kernel.schedule(cca_at + CCA_SYMBOLS, self.entity_id, EventKind.CCA)

    def _on_event(self, event: Event) -> None:
        if event.kind is EventKind.CCA:
            self._on_cca()
        elif event.kind is EventKind.TX_START:
            self._on_tx_start()
        elif event.kind is EventKind.ACK_TIMEOUT:
            self._on_ack_timeout()

    def _on_cca(self) -> None:
        attempt = self.attempt
        self._timer = None
        self.state = CsmaState.CCA
        if self.channel.cca(self.address) is CcaResult.BUSY:
            self.stats["cca_busy"] += 1
            attempt.cw = CONTENTION_WINDOW
            attempt.nb += 1
            attempt.be = min(attempt.be + 1, self.params.max_be)
            if attempt.nb > self.params.max_nb:
                self.stats["channel_access_failures"] += 1
                self._finish(CsmaOutcome.CHANNEL_ACCESS_FAILURE)
                return
            self._new_backoff(self._boundary + BACKOFF_PERIOD_SYMBOLS)
            return

        attempt.cw -= 1
        self._boundary += BACKOFF_PERIOD_SYMBOLS
        if attempt.cw > 0:
            self._timer = self.kernel.schedule(self._boundary + CCA_SYMBOLS, self.entity_id, EventKind.CCA)
        else:
            self._timer = self.kernel.schedule(self._boundary, self.entity_id, EventKind.TX_START)

    def _on_tx_start(self) -> None:
        now = self.kernel.now
        window = self._window
        assert window.start <= now < window.end, f"transmission at {now} outside window {window}"
        assert (now - window.start) % BACKOFF_PERIOD_SYMBOLS == 0, f"transmission at {now} not on a backoff boundary"
        self._timer = None
        self.state = CsmaState.TRANSMITTING
        tx_end = self.channel.begin_transmit(self.address, self.attempt.frame)
        self.stats["transmissions"] += 1
        self.state = CsmaState.AWAIT_ACK
        self._timer = self.kernel.schedule(tx_end + ACK_WAIT_SYMBOLS, self.entity_id, EventKind.ACK_TIMEOUT)

    def _on_ack_timeout(self) -> None:
        attempt = self.attempt
        self._timer = None
        attempt.retries += 1
        self.stats["ack_timeouts"] += 1
        if attempt.retries > self.params.max_frame_retries:
            self.stats["retry_failures"] += 1
            self._finish(CsmaOutcome.RETRY_FAILURE)
            return
        attempt.nb = 0
        attempt.be = self.params.min_be
        self._new_backoff(self.kernel.now)

    def _finish(self, outcome: CsmaOutcome) -> None:
        frame = self.attempt.frame
        assert self.attempt.retries <= self.params.max_frame_retries + 1
        self.attempt = None
        self._window = None
        self.state = CsmaState.IDLE
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"{self.entity_id} finished {describe_frame(frame)}: {outcome.value}", extra={
                'component': 'csma',
                'operation': 'attempt',
                'duration_ms': 0,
                'status': outcome.value
            })
        self.on_complete(frame, outcome, self.kernel.now)


def describe_frame(frame) -> str:
    if isinstance(frame, DataFrame):
        return f"data[{frame.traffic_class.value} seq={frame.seq}]"
    if isinstance(frame, GtsRequestFrame):
        return f"gts_request[len={frame.length} b={frame.burst} p={frame.periodic}]"
    return type(frame).__name__
