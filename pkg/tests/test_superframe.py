"""Test superframe geometry."""
from src.models.frames import BeaconFrame, GtsDescriptor, SuperframeSpec
from src.models.scenario import SuperframeConfig
from src.services.csma import ContentionWindow
from src.services.superframe import DeviceScheduleView, SuperframeTiming


def _beacon(cfp=0, gts_list=()):
    return BeaconFrame(
        superframe_spec=SuperframeSpec(beacon_order=4, superframe_order=4, cfp_mini_slots=cfp, cap_start_mini_slot=cfp),
        gts_list=list(gts_list),
    )


def test_empty_beacon_layout():
    """Test boundaries of a superframe with no CFP (12-byte beacon, 36 symbols)."""
    timing = SuperframeTiming.from_beacon(0, _beacon(), SuperframeConfig())
    assert timing.beacon_end == 36
    assert timing.usable_slots == 63
    assert timing.cfp_end == 36
    assert timing.active_end == 36 + 63 * 240
    assert timing.request_window_start == 36 + 55 * 240
    assert timing.data_window == ContentionWindow(36, 36 + 55 * 240)
    assert timing.request_window == ContentionWindow(36 + 55 * 240, 36 + 63 * 240)
    assert timing.next_beacon == 15360


def test_cfp_precedes_cap():
    """Test mini-slot 1 starts at the beacon end and the CAP follows the CFP."""
    gts = [GtsDescriptor(start_slot=1, length=3, mac_address=2), GtsDescriptor(start_slot=4, length=2, mac_address=1)]
    timing = SuperframeTiming.from_beacon(15360, _beacon(5, gts), SuperframeConfig())
    assert timing.beacon_end == 15360 + 56
    assert timing.slot_start(1) == timing.beacon_end
    assert timing.cfp_end == timing.beacon_end + 5 * 240
    assert timing.period_at(15360) == "beacon"
    assert timing.period_at(timing.beacon_end) == "cfp"
    assert timing.period_at(timing.cfp_end) == "cap"


def test_device_view_of_own_gts():
    """Test the absolute window of a granted GTS."""
    descriptor = GtsDescriptor(start_slot=4, length=2, mac_address=1)
    beacon = _beacon(5, [GtsDescriptor(start_slot=1, length=3, mac_address=2), descriptor])
    view = DeviceScheduleView(SuperframeTiming.from_received_beacon(56, beacon, SuperframeConfig()), descriptor)
    assert view.timing.start == 0
    assert view.gts_window == ContentionWindow(56 + 3 * 240, 56 + 5 * 240)
    assert view.cfp_end_slot == 5
    assert view.cap_window.start == 56 + 5 * 240


def test_baseline_cap_spans_active_period():
    """Test no request window is carved out without GTS allocation."""
    timing = SuperframeTiming.from_beacon(0, _beacon(), SuperframeConfig(), reserve_request_window=False)
    assert timing.request_window is None
    assert timing.data_window == ContentionWindow(36, timing.active_end)


def test_inactive_period():
    """Test BO > SO leaves the tail of the beacon interval inactive."""
    config = SuperframeConfig(beacon_order=5, superframe_order=4)
    timing = SuperframeTiming.from_beacon(0, _beacon(), config)
    assert timing.next_beacon == 30720
    assert timing.period_at(15359) == "cap"
    assert timing.period_at(15360) == "inactive"
    assert timing.period_at(30719) == "inactive"


def test_request_subslots_tile_the_request_window():
    """Test sixteen 120-symbol request sub-slots fill the eight-slot window exactly."""
    timing = SuperframeTiming.from_beacon(0, _beacon(), SuperframeConfig())
    window = timing.request_window
    assert timing.request_slot_start(0) == window.start
    assert timing.request_slot_start(1) == window.start + 120
    assert timing.request_slot_start(15) + 120 == window.end
    assert timing.request_slot_start(16) is None
    assert timing.request_slot_start(-1) is None
    bare = SuperframeTiming.from_beacon(0, _beacon(), SuperframeConfig(), reserve_request_window=False)
    assert bare.request_slot_start(0) is None
