"""Test the per-device traffic generators."""
import numpy as np
import pytest
from scipy import stats

from src.models.frames import TrafficClass
from src.models.scenario import BurstTickBase, PeriodicMode, TrafficProfile
from src.services.engine import EventKernel, RngStreams
from src.services.traffic import TrafficSource, burst_tick_symbols


RUN_SYMBOLS = 200 * 62500
MINI_SLOT = 240


class RecordingDevice:
    """Stands in for a device and remembers when each class was generated."""

    def __init__(self, kernel, address=1):
        self.kernel = kernel
        self.address = address
        self.arrivals = {traffic_class: [] for traffic_class in TrafficClass}

    def generate(self, traffic_class):
        self.arrivals[traffic_class].append(self.kernel.now)


def _run(seed=1, **profile):
    defaults = dict(p_burst=0.002, periodic_interval_s=0.1, normal_interval_s=0.05)
    defaults.update(profile)
    traffic = TrafficProfile(**defaults)
    kernel = EventKernel()
    device = RecordingDevice(kernel)
    source = TrafficSource(device, traffic, RngStreams(seed), kernel, burst_tick_symbols(traffic, MINI_SLOT))
    source.start()
    kernel.run_until(RUN_SYMBOLS)
    return device.arrivals


def test_poisson_periodic_gaps_are_exponential():
    """Test periodic gaps fit an exponential law with the configured mean."""
    arrivals = _run()
    gaps = np.diff(arrivals[TrafficClass.PERIODIC])
    assert gaps.min() >= 1
    assert stats.kstest(gaps, "expon", args=(0, 6250)).pvalue > 1e-3
    expected = RUN_SYMBOLS / 6250
    assert abs(len(arrivals[TrafficClass.PERIODIC]) - expected) < 5 * np.sqrt(expected)


def test_normal_rate():
    """Test normal frames arrive at 1 / normal_interval_s on average."""
    arrivals = _run()
    expected = RUN_SYMBOLS / 3125
    assert abs(len(arrivals[TrafficClass.NORMAL]) - expected) < 5 * np.sqrt(expected)


def test_deterministic_periodic_mode():
    """Test fixed-interval periodic frames after a random phase."""
    arrivals = _run(periodic_mode=PeriodicMode.DETERMINISTIC, periodic_interval_s=0.3)
    times = arrivals[TrafficClass.PERIODIC]
    assert 0 <= times[0] < 18750
    assert set(np.diff(times)) == {18750}


def test_burst_arrivals_on_tick_grid():
    """Test burst frames fall on mini-slot ticks with Bernoulli(p) success per tick."""
    arrivals = _run()
    times = arrivals[TrafficClass.BURST]
    assert all(at % MINI_SLOT == 0 for at in times)
    assert len(set(times)) == len(times)
    ticks = RUN_SYMBOLS // MINI_SLOT
    assert stats.binomtest(len(times), ticks, 0.002).pvalue > 1e-3


def test_burst_on_backoff_period_grid():
    """Test the alternative 20-symbol tick base."""
    arrivals = _run(p_burst=0.0005, burst_tick_base=BurstTickBase.BACKOFF_PERIOD)
    times = arrivals[TrafficClass.BURST]
    assert times
    assert all(at % 20 == 0 for at in times)
    assert stats.binomtest(len(times), RUN_SYMBOLS // 20, 0.0005).pvalue > 1e-3


def test_zero_burst_probability_is_silent():
    """Test p_burst = 0 generates no burst frames."""
    arrivals = _run(p_burst=0.0)
    assert arrivals[TrafficClass.BURST] == []


@pytest.mark.parametrize("seed", [1, 7])
def test_same_seed_same_arrivals(seed):
    """Test a seed fully determines the arrival times."""
    assert _run(seed=seed) == _run(seed=seed)


def test_seeds_differ():
    """Test different seeds give different sample paths."""
    assert _run(seed=1)[TrafficClass.PERIODIC] != _run(seed=2)[TrafficClass.PERIODIC]
