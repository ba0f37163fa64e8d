"""Adaptive mini-slot assignment run by the PAN coordinator.

Each round the pending request with the most burst frames is served next,
ties going to more periodic frames and then to the lower short address.
Grants tile the CFP contiguously from mini-slot 1; the grant that reaches
``max_slot`` is clamped to end there and every later request is denied
(``start_slot`` 0).
"""
from typing import Dict, Iterable, List, Optional

from pydantic import BaseModel, Field

from src.models.frames import MAX_MINI_SLOTS, GtsDescriptor, GtsRequestFrame
from src.utils.logging import sim_logger


logger = sim_logger.get_logger(__name__, 'allocator')


class RequestTable:
    """GTS requests collected during one CAP, at most one per address."""

    def __init__(self):
        self._entries: Dict[int, GtsRequestFrame] = {}

    @classmethod
    def from_requests(cls, requests: Iterable[GtsRequestFrame]) -> "RequestTable":
        """Build a table from a request list; duplicate addresses are an input error."""
        table = cls()
        for request in requests:
            if request.mac_address in table._entries:
                raise ValueError(f"duplicate GTS request for address 0x{request.mac_address:04x}")
            table.submit(request)
        return table

    def submit(self, request: GtsRequestFrame) -> None:
        """Record a request received over the air; a later one replaces an earlier one."""
        if request.length < 1:
            raise ValueError("requested length must be at least 1 mini-slot")
        self._entries[request.mac_address] = request

    def clear(self) -> None:
        self._entries.clear()

    @property
    def entries(self) -> List[GtsRequestFrame]:
        return list(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)


class GtsSchedule(BaseModel):
    """GTS allocation list plus the resulting CFP length."""
    entries: List[GtsDescriptor] = Field(default_factory=list)
    cfp_length_mini_slots: int = Field(default=0, ge=0, le=MAX_MINI_SLOTS)

    def descriptor_for(self, mac_address: int) -> Optional[GtsDescriptor]:
        for descriptor in self.entries:
            if descriptor.mac_address == mac_address:
                return descriptor
        return None

    @property
    def granted(self) -> List[GtsDescriptor]:
        return [descriptor for descriptor in self.entries if descriptor.granted]


def _outranks(candidate: GtsRequestFrame, best: GtsRequestFrame) -> bool:
    if candidate.burst != best.burst:
        return candidate.burst > best.burst
    if candidate.periodic != best.periodic:
        return candidate.periodic > best.periodic
    return candidate.mac_address < best.mac_address


def allocate(requests, max_slot: int = 48) -> GtsSchedule:
    """
    Assign CFP mini-slots to the collected requests.

    Args:
        requests: RequestTable or iterable of GtsRequestFrame
        max_slot: Last mini-slot the CFP may use (1..64)

    Returns:
        Schedule listing grants in grant order followed by denials
    """
    if not 1 <= max_slot <= MAX_MINI_SLOTS:
        raise ValueError(f"max_slot must lie in [1, {MAX_MINI_SLOTS}], got {max_slot}")
    table = requests if isinstance(requests, RequestTable) else RequestTable.from_requests(requests)

    pending = table.entries
    entries: List[GtsDescriptor] = []
    start_slot = 1
    while pending:
        index = 0
        for i in range(1, len(pending)):
            if _outranks(pending[i], pending[index]):
                index = i
        request = pending.pop(index)

        if start_slot <= max_slot:
            length = min(request.length, max_slot - start_slot + 1)
            entries.append(GtsDescriptor(start_slot=start_slot, length=length, mac_address=request.mac_address))
            start_slot += length
        else:
            entries.append(GtsDescriptor(start_slot=0, length=min(request.length, MAX_MINI_SLOTS),
                                         mac_address=request.mac_address))

    return GtsSchedule(entries=entries, cfp_length_mini_slots=start_slot - 1)
