"""Test per-class outcome accounting and report formatting."""
import pytest

from src.models.frames import DataFrame, TrafficClass
from src.models.metrics import CSV_COLUMNS, LossCause, RunMetadata
from src.models.scenario import TrafficProfile
from src.services.metrics import Delivered, Lost, MetricsCollector, OutcomeError


METADATA = RunMetadata(
    scenario="scenario1", protocol="adamac", p_burst=0.002, periodic_interval_s=0.1, seed=3,
    duration_s=10.0, burst_tick_base="mini_slot", periodic_mode="exponential",
)


@pytest.fixture
def collector():
    return MetricsCollector(TrafficProfile(p_burst=0.002, periodic_interval_s=0.1, normal_interval_s=0.05))


def _frame(traffic_class, seq, gen_time=0, src=1):
    return DataFrame(src=src, traffic_class=traffic_class, seq=seq, gen_time=gen_time)


def test_class_summary_formulas(collector):
    """Test loss rate and deadline-aware delivery ratio.

    Ten burst frames: seven on time, one late, two lost.
    """
    frames = [_frame(TrafficClass.BURST, seq) for seq in range(10)]
    for frame in frames:
        collector.record_generation(frame)
    for frame in frames[:7]:
        collector.record_outcome(frame, Delivered(6250))
    collector.record_outcome(frames[7], Delivered(15625 + 1))
    collector.record_outcome(frames[8], Lost(LossCause.QUEUE_OVERFLOW))
    collector.record_outcome(frames[9], Lost(LossCause.RETRY_FAILURE))

    report = collector.summarize(METADATA)
    burst = report.classes[TrafficClass.BURST]
    assert burst.generated == 10
    assert burst.delivered == 8
    assert burst.lost == 2
    assert burst.loss_rate == pytest.approx(0.2)
    assert burst.delivery_ratio == pytest.approx(0.7)
    assert burst.deadline_miss_count == 1
    assert burst.lost_by_cause[LossCause.QUEUE_OVERFLOW] == 1
    assert burst.max_delay_ms == pytest.approx(250.016)
    assert burst.mean_delay_ms == pytest.approx((7 * 100.0 + 250.016) / 8)


def test_normal_class_has_no_deadline(collector):
    """Test every delivered normal frame counts toward the delivery ratio."""
    frame = _frame(TrafficClass.NORMAL, 0)
    collector.record_generation(frame)
    collector.record_outcome(frame, Delivered(10 ** 7))
    normal = collector.summarize(METADATA).classes[TrafficClass.NORMAL]
    assert normal.delivery_ratio == 1.0
    assert normal.deadline_miss_count == 0


def test_conservation_after_finalize(collector):
    """Test generated = delivered + lost per class once pending frames are closed."""
    for seq in range(6):
        frame = _frame(TrafficClass.PERIODIC, seq, gen_time=seq)
        collector.record_generation(frame)
        if seq % 2:
            collector.record_outcome(frame, Delivered(seq + 100))
    assert collector.finalize() == 3
    periodic = collector.summarize(METADATA).classes[TrafficClass.PERIODIC]
    assert periodic.generated == periodic.delivered + periodic.lost
    assert periodic.lost_by_cause[LossCause.PENDING_AT_END] == 3


def test_summarize_requires_finalize(collector):
    """Test unresolved frames block the report."""
    collector.record_generation(_frame(TrafficClass.BURST, 0))
    with pytest.raises(OutcomeError):
        collector.summarize(METADATA)


def test_outcome_recorded_once(collector):
    """Test a frame cannot be both delivered and lost."""
    frame = _frame(TrafficClass.BURST, 0)
    collector.record_generation(frame)
    collector.record_outcome(frame, Delivered(5))
    with pytest.raises(OutcomeError):
        collector.record_outcome(frame, Lost(LossCause.RETRY_FAILURE))
    with pytest.raises(OutcomeError):
        collector.record_outcome(_frame(TrafficClass.BURST, 1), Delivered(5))


def test_empty_class_fields(collector):
    """Test ratios and delays are not applicable without frames."""
    report = collector.summarize(METADATA)
    summary = report.classes[TrafficClass.NORMAL]
    assert summary.loss_rate is None
    assert summary.mean_delay_ms is None
    row = report.csv_rows()[2]
    assert row["class"] == "normal"
    assert row["loss_rate"] == ""
    assert row["mean_delay_ms"] == ""


def test_csv_rows_format(collector):
    """Test one row per class with fixed decimals."""
    frame = _frame(TrafficClass.BURST, 0)
    collector.record_generation(frame)
    collector.record_outcome(frame, Delivered(6250))
    rows = collector.summarize(METADATA).csv_rows()
    assert [row["class"] for row in rows] == ["burst", "periodic", "normal"]
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[0]["p_burst"] == "0.002000"
    assert rows[0]["periodic_interval_s"] == "0.100"
    assert rows[0]["loss_rate"] == "0.000000"
    assert rows[0]["mean_delay_ms"] == "100.000"


def test_per_device_breakdown(collector):
    """Test the verbose rows split counts by device and class."""
    for src in (1, 2):
        frame = _frame(TrafficClass.PERIODIC, 0, src=src)
        collector.record_generation(frame)
        collector.record_outcome(frame, Delivered(100) if src == 1 else Lost(LossCause.QUEUE_OVERFLOW))
    report = collector.summarize(METADATA, radio_on_symbols={1: 62500, 2: 0})
    rows = report.device_rows()
    assert [(row["device"], row["delivered"], row["lost"]) for row in rows] == [("1", "1", "0"), ("2", "0", "1")]
    assert rows[0]["radio_on_ms"] == "1000.000"
