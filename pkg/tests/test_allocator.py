"""Test the adaptive GTS allocator."""
import numpy as np
import pytest

from src.models.frames import GtsRequestFrame
from src.services.allocator import RequestTable, allocate


A, B, C = 0x0001, 0x0002, 0x0003


def _request(address, length, burst, periodic):
    return GtsRequestFrame(mac_address=address, length=length, burst=burst, periodic=periodic)


def _oracle(requests, max_slot):
    """Stable sort by (burst desc, periodic desc, address asc), then prefix-assign with clamping."""
    ordered = sorted(requests, key=lambda r: (-r.burst, -r.periodic, r.mac_address))
    result = []
    cursor = 1
    for request in ordered:
        if cursor <= max_slot:
            length = min(request.length, max_slot - cursor + 1)
            result.append((request.mac_address, cursor, length))
            cursor += length
        else:
            result.append((request.mac_address, 0, min(request.length, 64)))
    return result, cursor - 1


def _as_tuples(schedule):
    return [(entry.mac_address, entry.start_slot, entry.length) for entry in schedule.entries]


def test_empty_request_table():
    """Test no requests gives an empty schedule."""
    schedule = allocate([])
    assert schedule.entries == []
    assert schedule.cfp_length_mini_slots == 0


def test_burst_first():
    """Test the request with more burst frames gets the earlier slots."""
    schedule = allocate([_request(A, 2, 1, 0), _request(B, 3, 2, 1)], max_slot=48)
    assert _as_tuples(schedule) == [(B, 1, 3), (A, 4, 2)]
    assert schedule.cfp_length_mini_slots == 5


def test_periodic_then_address_tie_break():
    """Test equal burst counts fall back to periodic, then to the lower address."""
    schedule = allocate([_request(C, 2, 1, 1), _request(B, 2, 1, 1), _request(A, 2, 1, 2)])
    assert [entry.mac_address for entry in schedule.entries] == [A, B, C]


def test_clamp_at_max_slot():
    """Test the grant crossing max_slot is clamped and later requests are denied."""
    requests = [_request(A, 3, 3, 0), _request(B, 3, 2, 0), _request(C, 4, 1, 0)]
    schedule = allocate(requests, max_slot=4)
    assert _as_tuples(schedule) == [(A, 1, 3), (B, 4, 1), (C, 0, 4)]
    assert schedule.cfp_length_mini_slots == 4
    assert [entry.mac_address for entry in schedule.granted] == [A, B]


def test_duplicate_address_is_input_error():
    """Test two requests from one address in one table."""
    with pytest.raises(ValueError, match="duplicate"):
        allocate([_request(A, 1, 0, 1), _request(A, 2, 1, 0)])


def test_request_table_keeps_latest():
    """Test a second request from the same device replaces the earlier one."""
    table = RequestTable()
    table.submit(_request(A, 1, 0, 1))
    table.submit(_request(A, 3, 2, 1))
    assert len(table) == 1
    assert table.entries[0].length == 3
    table.clear()
    assert len(table) == 0


def test_invalid_max_slot():
    """Test max_slot outside 1..64."""
    with pytest.raises(ValueError):
        allocate([], max_slot=0)
    with pytest.raises(ValueError):
        allocate([], max_slot=65)


def _random_table(rng):
    n = int(rng.integers(0, 24))
    addresses = rng.choice(np.arange(1, 200), size=n, replace=False)
    return [
        _request(int(address), int(rng.integers(1, 12)), int(rng.integers(0, 4)), int(rng.integers(0, 4)))
        for address in addresses
    ]


def test_oracle_equivalence():
    """Test 10^4 random tables against the sort-based oracle."""
    rng = np.random.default_rng(11)
    mismatches = 0
    for _ in range(10_000):
        requests = _random_table(rng)
        max_slot = int(rng.integers(1, 65))
        schedule = allocate(requests, max_slot=max_slot)
        expected, cfp_length = _oracle(requests, max_slot)
        if _as_tuples(schedule) != expected or schedule.cfp_length_mini_slots != cfp_length:
            mismatches += 1
    assert mismatches == 0


def test_grants_tile_the_cfp():
    """Test granted intervals are disjoint and cover exactly [1, cfp_length]."""
    rng = np.random.default_rng(12)
    for _ in range(500):
        schedule = allocate(_random_table(rng), max_slot=int(rng.integers(1, 65)))
        covered = []
        for entry in schedule.granted:
            covered.extend(range(entry.start_slot, entry.end_slot + 1))
        assert covered == list(range(1, schedule.cfp_length_mini_slots + 1))


def test_more_burst_means_earlier_slot():
    """Test monotone priority on burst counts."""
    rng = np.random.default_rng(13)
    for _ in range(500):
        requests = {r.mac_address: r for r in _random_table(rng)}
        schedule = allocate(list(requests.values()))
        granted = schedule.granted
        for x in granted:
            for y in granted:
                if requests[x.mac_address].burst > requests[y.mac_address].burst:
                    assert x.start_slot < y.start_slot


def test_permutation_invariance():
    """Test input order never changes the schedule."""
    rng = np.random.default_rng(14)
    for _ in range(500):
        requests = _random_table(rng)
        shuffled = [requests[i] for i in rng.permutation(len(requests))]
        assert allocate(requests, max_slot=20) == allocate(shuffled, max_slot=20)
