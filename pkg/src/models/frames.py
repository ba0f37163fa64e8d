"""Wire frame models exchanged between the PAN coordinator and its devices."""
from enum import Enum, IntEnum
from typing import List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


MAX_MINI_SLOTS = 64
COORDINATOR_ADDRESS = 0x0000
BROADCAST_ADDRESS = 0xFFFF


class TrafficClass(str, Enum):
    """Application traffic classes in descending priority."""
    BURST = "burst"
    PERIODIC = "periodic"
    NORMAL = "normal"

    @property
    def is_realtime(self) -> bool:
        return self is not TrafficClass.NORMAL


class FrameKind(IntEnum):
    """Frame type carried in the low bits of the frame control field."""
    BEACON = 0
    DATA = 1
    ACK = 2
    COMMAND = 3


class GtsDescriptor(BaseModel):
    """One GTS allocation list entry; ``start_slot`` 0 means no allocation."""
    model_config = ConfigDict(frozen=True)

    start_slot: int = Field(ge=0, le=MAX_MINI_SLOTS)
    length: int = Field(ge=1, le=MAX_MINI_SLOTS)
    mac_address: int = Field(ge=0, le=0xFFFF)

    @model_validator(mode="after")
    def _fits_superframe(self):
        if self.start_slot > 0 and self.end_slot > MAX_MINI_SLOTS:
            raise ValueError(f"start_slot + length - 1 exceeds {MAX_MINI_SLOTS}")
        return self

    @property
    def granted(self) -> bool:
        return self.start_slot > 0

    @property
    def end_slot(self) -> int:
        """Last owned mini-slot (inclusive)."""
        return self.start_slot + self.length - 1


class SuperframeSpec(BaseModel):
    """Superframe specification field of the beacon."""
    model_config = ConfigDict(frozen=True)

    beacon_order: int = Field(ge=0, le=14)
    superframe_order: int = Field(ge=0, le=14)
    cfp_mini_slots: int = Field(ge=0, le=MAX_MINI_SLOTS)
    cap_start_mini_slot: int = Field(ge=0, le=MAX_MINI_SLOTS)


def beacon_violations(spec: SuperframeSpec, gts_list: List[GtsDescriptor]) -> List[Tuple[str, str]]:
    """Return ``(field, problem)`` pairs for every broken beacon invariant.

    Granted descriptors come first in ascending start order and must be
    disjoint inside ``[1, cfp_mini_slots]``; denied descriptors trail.
    """
    problems: List[Tuple[str, str]] = []
    if spec.cap_start_mini_slot != spec.cfp_mini_slots:
        problems.append((
            "superframe_spec.cap_start_mini_slot",
            f"CAP must start right after the CFP ({spec.cfp_mini_slots}), got {spec.cap_start_mini_slot}",
        ))

    seen_denied = False
    previous_end = 0
    for index, descriptor in enumerate(gts_list):
        field = f"gts_list[{index}]"
        if not descriptor.granted:
            seen_denied = True
            continue
        if seen_denied:
            problems.append((field, "granted descriptor after a denied one"))
        if descriptor.start_slot <= previous_end:
            problems.append((field, f"overlaps or precedes slot {previous_end}"))
        if descriptor.end_slot > spec.cfp_mini_slots:
            problems.append((field, f"ends at slot {descriptor.end_slot} beyond CFP {spec.cfp_mini_slots}"))
        previous_end = max(previous_end, descriptor.end_slot)
    return problems


class BeaconFrame(BaseModel):
    """Beacon broadcast at every superframe start."""
    model_config = ConfigDict(frozen=True)

    superframe_spec: SuperframeSpec
    gts_list: List[GtsDescriptor] = Field(default_factory=list, max_length=MAX_MINI_SLOTS)
    beacon_seq: int = Field(default=0, ge=0, le=0xFF)
    src: int = Field(default=COORDINATOR_ADDRESS, ge=0, le=0xFFFF)

    @model_validator(mode="after")
    def _check_layout(self):
        problems = beacon_violations(self.superframe_spec, self.gts_list)
        if problems:
            field, problem = problems[0]
            raise ValueError(f"{field}: {problem}")
        return self

    def descriptor_for(self, mac_address: int) -> Union[GtsDescriptor, None]:
        for descriptor in self.gts_list:
            if descriptor.mac_address == mac_address:
                return descriptor
        return None


class GtsRequestFrame(BaseModel):
    """GTS allocation request sent by a device during the request window."""
    model_config = ConfigDict(frozen=True)

    mac_address: int = Field(ge=0, le=0xFFFF)
    length: int = Field(ge=1, le=0xFF)
    burst: int = Field(default=0, ge=0, le=0xFF)
    periodic: int = Field(default=0, ge=0, le=0xFF)
    seq: int = Field(default=0, ge=0, le=0xFF)


class DataFrame(BaseModel):
    """Application data frame; ``gen_time`` travels inside the payload."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    src: int = Field(ge=0, le=0xFFFF)
    dst: int = Field(default=COORDINATOR_ADDRESS, ge=0, le=0xFFFF)
    traffic_class: TrafficClass = Field(alias="class")
    seq: int = Field(ge=0, le=0xFF)
    gen_time: int = Field(ge=0)
    payload_len: int = Field(default=50, ge=9, le=116)

    @property
    def key(self) -> Tuple[int, int, int]:
        """Identity of the generated frame across retransmissions."""
        return (self.src, self.seq, self.gen_time)


class AckFrame(BaseModel):
    """Acknowledgment echoing the sequence number of the acknowledged frame."""
    model_config = ConfigDict(frozen=True)

    seq: int = Field(ge=0, le=0xFF)
    src: int = Field(default=COORDINATOR_ADDRESS, ge=0, le=0xFFFF)
    dst: int = Field(ge=0, le=0xFFFF)


Frame = Union[BeaconFrame, DataFrame, AckFrame, GtsRequestFrame]
