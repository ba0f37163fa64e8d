"""Test logging functionality."""
import pytest
import logging
from src.utils.logging import SimLogger, StructuredFormatter, log_sim_operation, sim_logger


def test_sim_logger_singleton():
    """Test that SimLogger is a singleton."""
    logger1 = SimLogger()
    logger2 = SimLogger()
    assert logger1 is logger2
    assert logger1 is sim_logger


def test_get_logger():
    """Test getting a logger instance."""
    logger = sim_logger.get_logger('test_module', 'engine')
    assert isinstance(logger, logging.Logger)
    assert logger.name == 'test_module'
    assert sim_logger.get_logger('test_module') is logger


def test_log_operation_reports_success(caplog):
    """Test log_operation emits start and completion records."""
    logger = sim_logger.get_logger('test', 'simulation')

    with caplog.at_level(logging.INFO):
        with sim_logger.log_operation(logger, 'run', 'simulation', seed=4):
            pass

    statuses = [record.status for record in caplog.records]
    assert statuses == ['started', 'success']
    assert caplog.records[-1].seed == 4


def test_log_operation_context_manager_with_exception(caplog):
    """Test log_operation re-raises and records the error type."""
    logger = sim_logger.get_logger('test', 'simulation')

    with pytest.raises(ValueError):
        with sim_logger.log_operation(logger, 'run', 'simulation'):
            raise ValueError("Test error")

    failure = caplog.records[-1]
    assert failure.status == 'error'
    assert failure.error_type == 'ValueError'


def test_log_metric(caplog):
    """Test logging a metric."""
    logger = sim_logger.get_logger('test', 'simulation')

    with caplog.at_level(logging.INFO):
        sim_logger.log_metric(logger, 'events_processed', 42, 'simulation', seed=1)

    record = caplog.records[-1]
    assert record.metric_name == 'events_processed'
    assert record.metric_value == 42


def test_log_sim_operation_decorator():
    """Test log_sim_operation keeps the wrapped function's result and name."""

    @log_sim_operation('sweep', 'run_points')
    def double(value):
        return value * 2

    assert double(5) == 10
    assert double.__name__ == 'double'


def test_set_level():
    """Test the root level follows --log-level and ignores unknown names."""
    original = sim_logger.level
    try:
        sim_logger.set_level('debug')
        assert logging.getLogger().level == logging.DEBUG
        sim_logger.set_level('chatty')
        assert sim_logger.level == logging.DEBUG
    finally:
        sim_logger.set_level(logging.getLevelName(original))


def test_structured_formatter():
    """Test StructuredFormatter."""
    formatter = StructuredFormatter(
        fmt='%(name)s - %(levelname)s - [%(component)s] [%(operation)s] %(message)s'
    )

    record = logging.LogRecord(
        name='test',
        level=logging.INFO,
        pathname='test.py',
        lineno=1,
        msg='Test message',
        args=(),
        exc_info=None
    )

    formatted = formatter.format(record)
    assert 'Test message' in formatted
    assert '[unknown] [unknown]' in formatted
