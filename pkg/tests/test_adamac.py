"""Test the Ada-MAC coordinator and device behaviour on small networks."""
from types import SimpleNamespace
from unittest.mock import patch

import pytest

from src.models.frames import BeaconFrame, TrafficClass
from src.models.metrics import LossCause
from src.models.scenario import ScenarioConfig, SuperframeConfig, TrafficProfile
from src.services.adamac import AdaMacDevice, PanCoordinator
from src.services.channel import RadioChannel
from src.services.engine import Event, EventKernel, EventKind, RngStreams, StreamPurpose
from src.services.metrics import Delivered, Lost, MetricsCollector


SUPERFRAME = 15360


def _network(n_devices=1, **overrides):
    """Coordinator plus ``n_devices`` Ada-MAC devices without traffic sources."""
    config = ScenarioConfig(n_devices=n_devices, **overrides)
    kernel = EventKernel()
    kernel.register("driver", lambda event: event.payload())
    channel = RadioChannel(kernel)
    metrics = MetricsCollector(TrafficProfile.from_scenario(config, 0.1))
    coordinator = PanCoordinator(kernel, channel, config)
    streams = RngStreams(1)
    devices = [
        AdaMacDevice(
            address, kernel, channel, metrics, config,
            data_rng=streams.stream(address, StreamPurpose.BACKOFF),
            request_rng=streams.stream(address, StreamPurpose.BACKOFF_REQUEST),
        )
        for address in range(1, n_devices + 1)
    ]
    coordinator.start()
    return SimpleNamespace(config=config, kernel=kernel, channel=channel, metrics=metrics,
                           coordinator=coordinator, devices=devices)


def _generate(net, at, device, traffic_class):
    frames = []
    net.kernel.schedule(at, "driver", EventKind.GENERATE, lambda: frames.append(device.generate(traffic_class)))
    return frames


def _outcome(net, frame):
    return net.metrics.records[frame.key].outcome


def test_beacon_every_interval():
    """Test beacons go out at multiples of the beacon interval."""
    net = _network()
    net.kernel.run_until(5 * SUPERFRAME)
    assert net.coordinator.beacon_times == [0, SUPERFRAME, 2 * SUPERFRAME, 3 * SUPERFRAME, 4 * SUPERFRAME, 5 * SUPERFRAME]


def test_beacon_interval_with_inactive_period():
    """Test BO=5, SO=4 doubles the beacon interval."""
    net = _network(superframe=SuperframeConfig(beacon_order=5, superframe_order=4))
    net.kernel.run_until(4 * SUPERFRAME)
    assert net.coordinator.beacon_times == [0, 2 * SUPERFRAME, 4 * SUPERFRAME]


def test_burst_frame_goes_through_requested_gts():
    """Test request in one superframe, GTS in the next, ACK within the mini-slot."""
    net = _network()
    device = net.devices[0]
    frames = _generate(net, 100, device, TrafficClass.BURST)
    net.kernel.run_until(2 * SUPERFRAME)

    outcome = _outcome(net, frames[0])
    assert isinstance(outcome, Delivered)
    assert SUPERFRAME < outcome.at < 2 * SUPERFRAME
    # one request in each of the two request windows
    assert device.requests_acked == 2
    assert device.gts_sent == 1 and device.gts_acked == 1
    assert net.coordinator.received[("cfp", "burst")] == 1
    assert net.coordinator.received[("cap", "gts_request")] == 2
    assert net.channel.stats().cfp_collisions == 0


def test_normal_frame_uses_cap():
    """Test normal frames contend in the CAP of the current superframe."""
    net = _network()
    frames = _generate(net, 100, net.devices[0], TrafficClass.NORMAL)
    net.kernel.run_until(SUPERFRAME)
    outcome = _outcome(net, frames[0])
    assert isinstance(outcome, Delivered)
    assert outcome.at < SUPERFRAME
    assert net.coordinator.received[("cap", "normal")] == 1


def test_no_request_without_realtime_backlog():
    """Test idle devices stay silent in the request window when only backlogged nodes request."""
    net = _network(allocator={"request_all_nodes": False})
    _generate(net, 100, net.devices[0], TrafficClass.NORMAL)
    net.kernel.run_until(2 * SUPERFRAME)
    assert net.devices[0].requests_sent == 0
    assert net.coordinator.last_schedule.entries == []


def test_idle_devices_keep_a_standing_slot():
    """Test idle devices request one standing mini-slot by default."""
    net = _network(n_devices=2)
    net.kernel.run_until(SUPERFRAME + 100)
    schedule = net.coordinator.last_schedule
    assert sorted(entry.mac_address for entry in schedule.granted) == [1, 2]
    assert all(entry.length == 1 for entry in schedule.entries)


def test_backlog_counted_at_own_request_subslot():
    """Test the request reports every real-time frame queued before the device's sub-slot."""
    net = _network()
    device = net.devices[0]
    _generate(net, 100, device, TrafficClass.BURST)
    _generate(net, 13000, device, TrafficClass.BURST)
    net.kernel.run_until(SUPERFRAME + 100)
    assert device.requests_sent == 1
    descriptor = net.coordinator.last_schedule.descriptor_for(device.address)
    assert descriptor.start_slot == 1
    assert descriptor.length == 2


def test_missed_beacon_skips_gts():
    """Test a device that misses the beacon does not use the GTS it was granted."""
    net = _network()
    device = net.devices[0]
    dropped = []

    def lossy_receiver(frame):
        if isinstance(frame, BeaconFrame) and SUPERFRAME <= net.kernel.now < 2 * SUPERFRAME:
            dropped.append(frame)
            return
        device.on_receive(frame)

    net.channel.attach(device.address, lossy_receiver)
    frames = _generate(net, 100, device, TrafficClass.BURST)
    net.kernel.run_until(4 * SUPERFRAME)

    assert len(dropped) == 1
    assert dropped[0].descriptor_for(device.address).granted
    outcome = _outcome(net, frames[0])
    assert isinstance(outcome, Delivered)
    assert outcome.at > 3 * SUPERFRAME


def test_beacon_expected_invalidates_view():
    """Test the schedule is dropped when the next beacon is due."""
    net = _network()
    device = net.devices[0]
    net.kernel.run_until(100)
    assert device.view is not None
    device._on_event(Event(net.kernel.now, 0, device.entity_id, EventKind.BEACON_EXPECTED))
    assert device.view is None
    assert device._cap_window_at(net.kernel.now) is None


def test_unacknowledged_gts_frame_is_requeued():
    """Test a GTS frame without ACK returns to the head of its queue."""
    net = _network()
    device = net.devices[0]
    frames = _generate(net, 100, device, TrafficClass.PERIODIC)
    with patch.object(net.coordinator, "_schedule_ack"):
        net.kernel.run_until(3 * SUPERFRAME)
    assert device.gts_sent >= 1
    assert device.gts_acked == 0
    assert device.queues.pending_counts().periodic == 1
    assert _outcome(net, frames[0]) is None


def test_queue_overflow_is_a_loss():
    """Test the eleventh periodic frame is lost to overflow."""
    net = _network()
    device = net.devices[0]
    frames = []
    for _ in range(11):
        frames.extend(_generate(net, 100, device, TrafficClass.PERIODIC))
    net.kernel.run_until(100)
    assert _outcome(net, frames[-1]) == Lost(LossCause.QUEUE_OVERFLOW)
    assert all(_outcome(net, frame) is None for frame in frames[:10])


def test_gts_slots_are_collision_free_under_load():
    """Test the CFP stays collision-free with many devices and full queues."""
    net = _network(n_devices=8)
    for device in net.devices:
        for offset in range(6):
            _generate(net, 100 + offset, device, TrafficClass.PERIODIC)
            _generate(net, 200 + offset, device, TrafficClass.BURST)
    net.kernel.run_until(6 * SUPERFRAME)
    assert net.channel.stats().cfp_collisions == 0
    assert net.coordinator.received[("cfp", "burst")] > 0


@pytest.mark.parametrize("cap", [1, 3])
def test_request_length_capped_per_node(cap):
    """Test requested length is min(burst + periodic, per-node cap)."""
    net = _network(allocator={"per_node_cap_slots": cap})
    device = net.devices[0]
    for _ in range(5):
        _generate(net, 100, device, TrafficClass.PERIODIC)
    net.kernel.run_until(SUPERFRAME + 100)
    assert net.coordinator.last_schedule.descriptor_for(device.address).length == cap


def test_requests_use_dedicated_subslots():
    """Test each device sends its request in its own 120-symbol sub-slot of the request window."""
    net = _network(n_devices=3)
    window_start = 36 + 55 * 240
    received = []
    submit = net.coordinator.requests.submit

    def record(request):
        received.append((net.kernel.now, request.mac_address))
        submit(request)

    with patch.object(net.coordinator.requests, "submit", side_effect=record):
        net.kernel.run_until(SUPERFRAME - 1)
    assert received == [
        (window_start + 42, 1),
        (window_start + 120 + 42, 2),
        (window_start + 240 + 42, 3),
    ]
    assert net.channel.stats().collisions_by_period == {}


def test_full_network_requests_are_all_acknowledged():
    """Test all sixteen devices get their request through in a single window."""
    net = _network(n_devices=16)
    net.kernel.run_until(SUPERFRAME + 100)
    assert [device.requests_acked for device in net.devices] == [1] * 16
    granted = net.coordinator.last_schedule.granted
    assert sorted(entry.mac_address for entry in granted) == list(range(1, 17))
    assert net.channel.stats().collisions_by_period == {}


def test_burst_after_request_uses_standing_slot():
    """Test a burst queued after the device's request still leaves in the next CFP."""
    net = _network()
    device = net.devices[0]
    frames = _generate(net, 14000, device, TrafficClass.BURST)
    net.kernel.run_until(2 * SUPERFRAME)
    outcome = _outcome(net, frames[0])
    assert isinstance(outcome, Delivered)
    assert SUPERFRAME < outcome.at < SUPERFRAME + 36 + 240 + 200


def test_unacknowledged_request_times_out():
    """Test a request without ACK is dropped after the ACK wait and not resent."""
    net = _network()
    device = net.devices[0]
    with patch.object(net.coordinator, "_schedule_ack"):
        net.kernel.run_until(SUPERFRAME - 1)
    assert device.requests_sent == 1
    assert device.requests_acked == 0
    assert device._request_frame is None
    assert len(net.coordinator.requests) == 1


def test_contended_request_mode():
    """Test requests sent by CSMA/CA in the request window still earn a GTS."""
    net = _network(superframe=SuperframeConfig(request_access="csma"))
    device = net.devices[0]
    assert device.request_tx is not None
    frames = _generate(net, 100, device, TrafficClass.BURST)
    net.kernel.run_until(2 * SUPERFRAME)
    assert device.requests_acked >= 1
    outcome = _outcome(net, frames[0])
    assert isinstance(outcome, Delivered)
    assert SUPERFRAME < outcome.at < 2 * SUPERFRAME


@pytest.mark.parametrize("superframe, n_descriptors, limit", [
    ({}, 0, 55),
    ({}, 16, 55),
    ({}, 30, 54),
    ({"max_cfp_mini_slots": 40}, 16, 40),
])
def test_cfp_limit_keeps_request_window(superframe, n_descriptors, limit):
    """Test grants stop short of the request window however long the beacon grows."""
    net = _network(superframe=superframe)
    assert net.coordinator.cfp_limit(n_descriptors) == limit
