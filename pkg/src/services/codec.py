"""Byte-exact frame codec.

All multi-byte fields are little-endian. Layouts are documented in FORMATS.md.
Every frame starts with a 2-byte frame control field (frame kind in bits 0-2)
and a sequence number, and ends with a 2-byte FCS (CRC-16/XMODEM over all
preceding bytes, ``binascii.crc_hqx(body, 0)``).
"""
import binascii
import struct
from typing import List

from pydantic import ValidationError

from src.models.frames import (
    AckFrame, BeaconFrame, DataFrame, Frame, FrameKind, GtsDescriptor,
    GtsRequestFrame, SuperframeSpec, TrafficClass, beacon_violations,
)


PAN_ID = 0xABCD
GTS_REQUEST_COMMAND = 0x09
FCS_BYTES = 2
DESCRIPTOR_BYTES = 5
DATA_METADATA_BYTES = 9

_FRAME_KIND_MASK = 0x0007
_PAN_ID_COMPRESSION = 0x0040

_BEACON_HEADER = struct.Struct("<HBH")        # fc, beacon_seq, src
_SUPERFRAME_SPEC = struct.Struct("<BBBBB")    # BO, SO, cfp slots, cap start, descriptor count
_DESCRIPTOR = struct.Struct("<HBBB")          # address, start, length, reserved
_ADDRESSED_HEADER = struct.Struct("<HBHHH")   # fc, seq, pan id, dst, src
_DATA_METADATA = struct.Struct("<BQ")         # class code, gen_time
_GTS_REQUEST = struct.Struct("<BBBB")         # command id, length, burst, periodic
_FCS = struct.Struct("<H")

_CLASS_CODES = {TrafficClass.BURST: 0, TrafficClass.PERIODIC: 1, TrafficClass.NORMAL: 2}
_CLASS_BY_CODE = {code: traffic_class for traffic_class, code in _CLASS_CODES.items()}


class EncodeError(ValueError):
    """Frame violates its invariants and cannot be put on the air."""


class DecodeError(ValueError):
    """Bytes are truncated or malformed; the frame is treated as lost."""


def _require(field: str, value: int, low: int, high: int) -> None:
    if not isinstance(value, int) or not low <= value <= high:
        raise EncodeError(f"{field}={value!r} outside [{low}, {high}]")


def _frame_control(kind: FrameKind) -> int:
    if kind is FrameKind.BEACON:
        return int(kind)
    return int(kind) | _PAN_ID_COMPRESSION


def _with_fcs(body: bytes) -> bytes:
    return body + _FCS.pack(binascii.crc_hqx(body, 0))


def encode(frame: Frame) -> bytes:
    """
    Serialize a frame to its MAC wire bytes.

    Args:
        frame: Beacon, data, ACK or GTS request frame

    Returns:
        MPDU bytes including the trailing FCS

    Raises:
        EncodeError: A field breaks its range or layout invariant
    """
    if isinstance(frame, DataFrame):
        return _encode_data(frame)
    if isinstance(frame, AckFrame):
        return _encode_ack(frame)
    if isinstance(frame, BeaconFrame):
        return _encode_beacon(frame)
    if isinstance(frame, GtsRequestFrame):
        return _encode_gts_request(frame)
    raise EncodeError(f"frame: unsupported type {type(frame).__name__}")


def _encode_beacon(frame: BeaconFrame) -> bytes:
    spec = frame.superframe_spec
    _require("beacon_seq", frame.beacon_seq, 0, 0xFF)
    _require("src", frame.src, 0, 0xFFFF)
    _require("superframe_spec.beacon_order", spec.beacon_order, 0, 14)
    _require("superframe_spec.superframe_order", spec.superframe_order, 0, 14)
    _require("superframe_spec.cfp_mini_slots", spec.cfp_mini_slots, 0, 64)
    _require("superframe_spec.cap_start_mini_slot", spec.cap_start_mini_slot, 0, 64)
    _require("gts_list", len(frame.gts_list), 0, 64)
    for index, descriptor in enumerate(frame.gts_list):
        _require(f"gts_list[{index}].start_slot", descriptor.start_slot, 0, 64)
        _require(f"gts_list[{index}].length", descriptor.length, 1, 64)
        _require(f"gts_list[{index}].mac_address", descriptor.mac_address, 0, 0xFFFF)
        if descriptor.granted and descriptor.end_slot > 64:
            raise EncodeError(f"gts_list[{index}]: ends past mini-slot 64")
    problems = beacon_violations(spec, frame.gts_list)
    if problems:
        field, problem = problems[0]
        raise EncodeError(f"{field}: {problem}")

    parts: List[bytes] = [
        _BEACON_HEADER.pack(_frame_control(FrameKind.BEACON), frame.beacon_seq, frame.src),
        _SUPERFRAME_SPEC.pack(
            spec.beacon_order, spec.superframe_order, spec.cfp_mini_slots,
            spec.cap_start_mini_slot, len(frame.gts_list),
        ),
    ]
    for descriptor in frame.gts_list:
        parts.append(_DESCRIPTOR.pack(descriptor.mac_address, descriptor.start_slot, descriptor.length, 0))
    return _with_fcs(b"".join(parts))


def _encode_data(frame: DataFrame) -> bytes:
    _require("seq", frame.seq, 0, 0xFF)
    _require("src", frame.src, 0, 0xFFFF)
    _require("dst", frame.dst, 0, 0xFFFF)
    _require("payload_len", frame.payload_len, DATA_METADATA_BYTES, 116)
    _require("gen_time", frame.gen_time, 0, 2 ** 64 - 1)
    header = _ADDRESSED_HEADER.pack(_frame_control(FrameKind.DATA), frame.seq, PAN_ID, frame.dst, frame.src)
    metadata = _DATA_METADATA.pack(_CLASS_CODES[frame.traffic_class], frame.gen_time)
    filler = bytes(frame.payload_len - DATA_METADATA_BYTES)
    return _with_fcs(header + metadata + filler)


def _encode_ack(frame: AckFrame) -> bytes:
    _require("seq", frame.seq, 0, 0xFF)
    _require("src", frame.src, 0, 0xFFFF)
    _require("dst", frame.dst, 0, 0xFFFF)
    return _with_fcs(_ADDRESSED_HEADER.pack(_frame_control(FrameKind.ACK), frame.seq, PAN_ID, frame.dst, frame.src))


def _encode_gts_request(frame: GtsRequestFrame) -> bytes:
    _require("seq", frame.seq, 0, 0xFF)
    _require("mac_address", frame.mac_address, 0, 0xFFFF)
    _require("length", frame.length, 1, 0xFF)
    _require("burst", frame.burst, 0, 0xFF)
    _require("periodic", frame.periodic, 0, 0xFF)
    header = _ADDRESSED_HEADER.pack(_frame_control(FrameKind.COMMAND), frame.seq, PAN_ID, 0x0000, frame.mac_address)
    command = _GTS_REQUEST.pack(GTS_REQUEST_COMMAND, frame.length, frame.burst, frame.periodic)
    return _with_fcs(header + command)


def decode(data: bytes) -> Frame:
    """
    Parse MAC wire bytes back into a frame.

    Raises:
        DecodeError: Truncated input, bad FCS, unknown kind or an invariant
            violation such as overlapping GTS descriptors
    """
    data = bytes(data)
    if len(data) < 3 + FCS_BYTES:
        raise DecodeError(f"truncated frame of {len(data)} bytes")
    body, fcs = data[:-FCS_BYTES], _FCS.unpack(data[-FCS_BYTES:])[0]
    if binascii.crc_hqx(body, 0) != fcs:
        raise DecodeError("FCS mismatch")

    try:
        kind = FrameKind(struct.unpack_from("<H", body)[0] & _FRAME_KIND_MASK)
    except ValueError as exc:
        raise DecodeError(f"unknown frame kind: {exc}") from None

    try:
        if kind is FrameKind.BEACON:
            return _decode_beacon(body)
        if kind is FrameKind.DATA:
            return _decode_data(body)
        if kind is FrameKind.ACK:
            return _decode_ack(body)
        return _decode_command(body)
    except ValidationError as exc:
        error = exc.errors()[0]
        path = ".".join(str(part) for part in error["loc"]) or "frame"
        raise DecodeError(f"{path}: {error['msg']}") from None
    except struct.error as exc:
        raise DecodeError(f"truncated {kind.name.lower()} frame: {exc}") from None


def _decode_beacon(body: bytes) -> BeaconFrame:
    _, beacon_seq, src = _BEACON_HEADER.unpack_from(body)
    offset = _BEACON_HEADER.size
    bo, so, cfp, cap_start, count = _SUPERFRAME_SPEC.unpack_from(body, offset)
    offset += _SUPERFRAME_SPEC.size
    expected = offset + count * DESCRIPTOR_BYTES
    if len(body) != expected:
        raise DecodeError(f"beacon announces {count} descriptors but carries {len(body) - offset} bytes")
    descriptors = []
    for _ in range(count):
        address, start, length, _reserved = _DESCRIPTOR.unpack_from(body, offset)
        offset += DESCRIPTOR_BYTES
        descriptors.append(GtsDescriptor(start_slot=start, length=length, mac_address=address))
    spec = SuperframeSpec(
        beacon_order=bo, superframe_order=so, cfp_mini_slots=cfp, cap_start_mini_slot=cap_start,
    )
    return BeaconFrame(superframe_spec=spec, gts_list=descriptors, beacon_seq=beacon_seq, src=src)


def _decode_data(body: bytes) -> DataFrame:
    _, seq, pan_id, dst, src = _ADDRESSED_HEADER.unpack_from(body)
    _check_pan(pan_id)
    class_code, gen_time = _DATA_METADATA.unpack_from(body, _ADDRESSED_HEADER.size)
    if class_code not in _CLASS_BY_CODE:
        raise DecodeError(f"class: unknown code {class_code}")
    return DataFrame(
        src=src, dst=dst, traffic_class=_CLASS_BY_CODE[class_code], seq=seq,
        gen_time=gen_time, payload_len=len(body) - _ADDRESSED_HEADER.size,
    )


def _decode_ack(body: bytes) -> AckFrame:
    if len(body) != _ADDRESSED_HEADER.size:
        raise DecodeError(f"ack frame of {len(body) + FCS_BYTES} bytes")
    _, seq, pan_id, dst, src = _ADDRESSED_HEADER.unpack_from(body)
    _check_pan(pan_id)
    return AckFrame(seq=seq, src=src, dst=dst)


def _decode_command(body: bytes) -> GtsRequestFrame:
    if len(body) != _ADDRESSED_HEADER.size + _GTS_REQUEST.size:
        raise DecodeError(f"command frame of {len(body) + FCS_BYTES} bytes")
    _, seq, pan_id, _dst, src = _ADDRESSED_HEADER.unpack_from(body)
    _check_pan(pan_id)
    command, length, burst, periodic = _GTS_REQUEST.unpack_from(body, _ADDRESSED_HEADER.size)
    if command != GTS_REQUEST_COMMAND:
        raise DecodeError(f"command: unsupported id 0x{command:02x}")
    return GtsRequestFrame(mac_address=src, length=length, burst=burst, periodic=periodic, seq=seq)


def _check_pan(pan_id: int) -> None:
    if pan_id != PAN_ID:
        raise DecodeError(f"pan_id: 0x{pan_id:04x} is not this PAN")


def encoded_length(frame: Frame) -> int:
    """MAC frame length in bytes without building the frame bytes."""
    if isinstance(frame, DataFrame):
        return _ADDRESSED_HEADER.size + frame.payload_len + FCS_BYTES
    if isinstance(frame, AckFrame):
        return _ADDRESSED_HEADER.size + FCS_BYTES
    if isinstance(frame, GtsRequestFrame):
        return _ADDRESSED_HEADER.size + _GTS_REQUEST.size + FCS_BYTES
    return _BEACON_HEADER.size + _SUPERFRAME_SPEC.size + DESCRIPTOR_BYTES * len(frame.gts_list) + FCS_BYTES
